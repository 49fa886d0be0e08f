#include "cdiag/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "cdiag/classifier.hpp"
#include "cdiag/parser.hpp"

namespace cdiag {

using nlohmann::json;

namespace {

const json& need(const json& j, const std::string& key, int line, const std::string& prefix = "") {
  std::string name = prefix.empty() ? key : prefix + "." + key;
  if (!j.is_object()) throw IngestError(prefix.empty() ? "$" : prefix, "expected an object", line);
  auto it = j.find(key);
  if (it == j.end()) throw IngestError(name, "missing", line);
  return *it;
}

std::int64_t int_field(const json& j, const std::string& key, int line, const std::string& prefix = "") {
  const json& v = need(j, key, line, prefix);
  if (!v.is_number_integer()) throw IngestError(prefix.empty() ? key : prefix + "." + key, "expected an integer", line);
  return v.get<std::int64_t>();
}

double num_field(const json& j, const std::string& key, int line) {
  const json& v = need(j, key, line);
  if (!v.is_number()) throw IngestError(key, "expected a number", line);
  return v.get<double>();
}

std::string str_field(const json& j, const std::string& key, int line) {
  const json& v = need(j, key, line);
  if (!v.is_string()) throw IngestError(key, "expected a string", line);
  return v.get<std::string>();
}

void check_version(const json& j, int line) {
  std::int64_t v = int_field(j, "schema_version", line);
  if (v != kEventSchemaVersion)
    throw IngestError("schema_version", "unsupported version " + std::to_string(v), line);
}

std::int64_t timestamp_field(const json& j, int line) {
  std::int64_t t = int_field(j, "timestamp", line);
  if (t < 0) throw IngestError("timestamp", "must be non-negative epoch seconds", line);
  return t;
}

std::string id_field(const json& j, const std::string& key, int line) {
  std::string s = str_field(j, key, line);
  if (s.empty()) throw IngestError(key, "must not be empty", line);
  return s;
}

std::vector<std::pair<int, json>> parse_jsonl(const std::string& text) {
  std::vector<std::pair<int, json>> out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.emplace_back(n, json::parse(line));
    } catch (const json::parse_error& e) {
      throw IngestError("$", std::string("not valid JSON: ") + e.what(), n);
    }
  }
  return out;
}

bool before(const SourceSpan& a, int line, int col) {
  return a.start_line < line || (a.start_line == line && a.start_col <= col);
}

bool overlaps(const SourceSpan& a, const SourceSpan& b) {
  return before(a, b.end_line, b.end_col) && before(b, a.end_line, a.end_col);
}

int line_count(const std::string& s) {
  if (s.empty()) return 0;
  int n = static_cast<int>(std::count(s.begin(), s.end(), '\n'));
  return s.back() == '\n' ? n : n + 1;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

std::vector<LineEdit> line_diff(const std::string& a, const std::string& b) {
  auto x = split_lines(a), y = split_lines(b);
  size_t n = x.size(), m = y.size();
  std::vector<std::vector<int>> L(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      L[i][j] = x[i] == y[j] ? L[i + 1][j + 1] + 1 : std::max(L[i + 1][j], L[i][j + 1]);
  std::vector<LineEdit> out;
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[i] == y[j]) {
      ++i, ++j;
    } else if (j < m && (i == n || L[i][j + 1] >= L[i + 1][j])) {
      out.push_back({true, static_cast<int>(j + 1), y[j]});
      ++j;
    } else {
      out.push_back({false, static_cast<int>(i + 1), x[i]});
      ++i;
    }
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json span_json(const SourceSpan& s) {
  return {{"start_line", s.start_line}, {"start_col", s.start_col},
          {"end_line", s.end_line}, {"end_col", s.end_col}};
}

bool already_ingested(const SlaRecord& r, const std::string& hash) {
  for (const auto& e : r.log) {
    if (e.kind != "ingest") continue;
    json p = json::parse(e.payload, nullptr, false);
    if (p.is_object() && p.value("hash", "") == hash) return true;
  }
  return false;
}

std::optional<std::int64_t> last_snapshot_time(const SlaRecord& r, const std::string& exercise) {
  std::optional<std::int64_t> t;
  for (const auto& e : r.log) {
    if (e.kind != "snapshot") continue;
    json p = json::parse(e.payload, nullptr, false);
    if (p.is_object() && p.value("exercise", "") == exercise) t = p.value("timestamp", std::int64_t{0});
  }
  return t;
}

}  // namespace

// ---- questionnaires ---------------------------------------------------------------

Questionnaire questionnaire_from_json(const json& j) {
  Questionnaire q;
  check_version(j, 0);
  q.id = id_field(j, "id", 0);
  q.title = j.value("title", q.id);
  q.similarity_key = j.value("similarity_key", "");
  const json& qs = need(j, "questions", 0);
  if (!qs.is_array() || qs.empty()) throw IngestError("questions", "expected a non-empty array");
  std::set<std::string> keys;
  for (size_t i = 0; i < qs.size(); ++i) {
    std::string p = "questions[" + std::to_string(i) + "]";
    SurveyQuestion x;
    const json& e = qs[i];
    if (!e.is_object() || !e.contains("key") || !e["key"].is_string())
      throw IngestError(p + ".key", "missing");
    x.key = e["key"].get<std::string>();
    if (!keys.insert(x.key).second) throw IngestError(p + ".key", "duplicate '" + x.key + "'");
    x.text = e.value("text", "");
    for (const auto& c : e.value("concepts", json::array())) {
      auto id = concept_from_name(c.get<std::string>());
      if (!id) throw IngestError(p + ".concepts", "unknown concept '" + c.get<std::string>() + "'");
      x.concepts.push_back(*id);
    }
    x.fields = e.value("fields", std::vector<std::string>{"text"});
    q.questions.push_back(std::move(x));
  }
  if (!q.similarity_key.empty() && !keys.count(q.similarity_key))
    throw IngestError("similarity_key", "not a declared question");
  return q;
}

Questionnaire load_questionnaire(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IngestError("$", path + ": " + e.what());
  }
  return questionnaire_from_json(j);
}

// ---- events ------------------------------------------------------------------------

CodeSnapshot snapshot_from_json(const json& j, int line) {
  check_version(j, line);
  CodeSnapshot s;
  s.timestamp = timestamp_field(j, line);
  s.student_id = id_field(j, "student_id", line);
  s.exercise_id = id_field(j, "exercise_id", line);
  s.source = str_field(j, "source", line);
  return s;
}

GazeEvent gaze_from_json(const json& j, int line) {
  check_version(j, line);
  GazeEvent e;
  e.timestamp = timestamp_field(j, line);
  e.student_id = id_field(j, "student_id", line);
  const json& sp = need(j, "span", line);
  e.span.start_line = static_cast<int>(int_field(sp, "start_line", line, "span"));
  e.span.start_col = static_cast<int>(int_field(sp, "start_col", line, "span"));
  e.span.end_line = static_cast<int>(int_field(sp, "end_line", line, "span"));
  e.span.end_col = static_cast<int>(int_field(sp, "end_col", line, "span"));
  if (e.span.start_line < 1 || e.span.start_col < 1 || e.span.end_line < e.span.start_line ||
      (e.span.end_line == e.span.start_line && e.span.end_col < e.span.start_col))
    throw IngestError("span", "not a valid 1-based region", line);
  e.dwell_ms = num_field(j, "dwell_ms", line);
  if (!(e.dwell_ms >= 0)) throw IngestError("dwell_ms", "must be >= 0", line);
  return e;
}

EmotionEvent emotion_from_json(const json& j, int line) {
  check_version(j, line);
  EmotionEvent e;
  e.timestamp = timestamp_field(j, line);
  e.speaker_id = id_field(j, "speaker_id", line);
  std::string label = str_field(j, "label", line);
  auto em = emotion_from_name(label);
  if (!em) throw IngestError("label", "unknown emotion '" + label + "'", line);
  e.label = *em;
  e.confidence = num_field(j, "confidence", line);
  if (!(e.confidence >= 0 && e.confidence <= 1)) throw IngestError("confidence", "outside [0, 1]", line);
  return e;
}

SocialEvent social_from_json(const json& j, int line) {
  check_version(j, line);
  SocialEvent e;
  e.timestamp = timestamp_field(j, line);
  e.speaker_id = id_field(j, "speaker_id", line);
  e.duration_s = num_field(j, "duration_s", line);
  if (!(e.duration_s >= 0)) throw IngestError("duration_s", "must be >= 0", line);
  return e;
}

SurveyRecord survey_from_json(const json& j, const Questionnaire& q, int line) {
  check_version(j, line);
  SurveyRecord r;
  r.timestamp = timestamp_field(j, line);
  r.student_id = id_field(j, "student_id", line);
  r.exercise_id = id_field(j, "exercise_id", line);
  const json& answers = need(j, "answers", line);
  if (!answers.is_object()) throw IngestError("answers", "expected an object", line);
  for (auto it = answers.begin(); it != answers.end(); ++it) {
    bool declared = std::any_of(q.questions.begin(), q.questions.end(),
                                [&](const SurveyQuestion& x) { return x.key == it.key(); });
    if (!declared)
      throw IngestError("answers." + it.key(), "not a question of '" + q.id + "'", line);
  }
  for (const auto& question : q.questions) {
    std::string p = "answers." + question.key;
    auto it = answers.find(question.key);
    if (it == answers.end()) throw IngestError(p, "missing answer", line);
    const json& a = *it;
    if (!a.is_object()) throw IngestError(p, "expected an object", line);
    SurveyAnswer ans;
    for (auto f = a.begin(); f != a.end(); ++f) {
      const std::string& k = f.key();
      if (std::find(question.fields.begin(), question.fields.end(), k) == question.fields.end())
        throw IngestError(p + "." + k, "field not declared for this question", line);
      const json& v = f.value();
      if (k == "text") {
        if (!v.is_string()) throw IngestError(p + ".text", "expected a string", line);
        ans.text = v.get<std::string>();
      } else if (k == "attempts") {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
          throw IngestError(p + ".attempts", "expected an integer >= 1", line);
        ans.attempts = v.get<int>();
      } else if (k == "errors") {
        if (!v.is_array()) throw IngestError(p + ".errors", "expected an array", line);
        for (size_t i = 0; i < v.size(); ++i) {
          std::string ep = p + ".errors[" + std::to_string(i) + "]";
          if (!v[i].is_object() || !v[i].contains("concept") || !v[i]["concept"].is_string())
            throw IngestError(ep + ".concept", "missing", line);
          auto c = concept_from_name(v[i]["concept"].get<std::string>());
          if (!c) throw IngestError(ep + ".concept", "unknown concept", line);
          std::string kind = v[i].value("kind", "incorrect-recall");
          if (!category_from_name(kind)) throw IngestError(ep + ".kind", "unknown category '" + kind + "'", line);
          ans.errors.push_back({*c, kind});
        }
      } else if (k == "predicted_correct" || k == "observed_correct") {
        if (!v.is_boolean()) throw IngestError(p + "." + k, "expected a boolean", line);
        (k == "predicted_correct" ? ans.predicted_correct : ans.observed_correct) = v.get<bool>();
      } else if (k == "similarity") {
        if (!v.is_number() || v.get<double>() < 0 || v.get<double>() > 1)
          throw IngestError(p + ".similarity", "expected a number in [0, 1]", line);
        ans.similarity = v.get<double>();
      } else {
        throw IngestError(p + "." + k, "unknown field", line);
      }
    }
    r.answers.emplace_back(question.key, std::move(ans));
  }
  return r;
}

json to_json(const CodeSnapshot& s) {
  return {{"schema_version", kEventSchemaVersion}, {"timestamp", s.timestamp},
          {"student_id", s.student_id}, {"exercise_id", s.exercise_id}, {"source", s.source}};
}

json to_json(const GazeEvent& e) {
  return {{"schema_version", kEventSchemaVersion}, {"timestamp", e.timestamp},
          {"student_id", e.student_id}, {"span", span_json(e.span)}, {"dwell_ms", e.dwell_ms}};
}

json to_json(const EmotionEvent& e) {
  return {{"schema_version", kEventSchemaVersion}, {"timestamp", e.timestamp},
          {"speaker_id", e.speaker_id}, {"label", std::string(emotion_name(e.label))},
          {"confidence", e.confidence}};
}

json to_json(const SocialEvent& e) {
  return {{"schema_version", kEventSchemaVersion}, {"timestamp", e.timestamp},
          {"speaker_id", e.speaker_id}, {"duration_s", e.duration_s}};
}

json to_json(const SurveyRecord& r) {
  json answers = json::object();
  for (const auto& [k, a] : r.answers) {
    json x = json::object();
    if (!a.text.empty()) x["text"] = a.text;
    if (a.attempts) x["attempts"] = *a.attempts;
    if (!a.errors.empty()) {
      json errs = json::array();
      for (const auto& e : a.errors)
        errs.push_back({{"concept", std::string(concept_name(e.concept_id))}, {"kind", e.kind}});
      x["errors"] = errs;
    }
    if (a.predicted_correct) x["predicted_correct"] = *a.predicted_correct;
    if (a.observed_correct) x["observed_correct"] = *a.observed_correct;
    if (a.similarity) x["similarity"] = *a.similarity;
    answers[k] = x;
  }
  return {{"schema_version", kEventSchemaVersion}, {"timestamp", r.timestamp},
          {"student_id", r.student_id}, {"exercise_id", r.exercise_id}, {"answers", answers}};
}

std::vector<std::pair<int, json>> read_jsonl(const std::string& path) {
  return parse_jsonl(read_file(path));
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---- snapshots ---------------------------------------------------------------------

SnapshotDiff diff_snapshots(const CodeSnapshot& prev, const CodeSnapshot& next) {
  if (prev.student_id != next.student_id || prev.exercise_id != next.exercise_id)
    throw std::invalid_argument("snapshots belong to different students or exercises");
  if (prev.timestamp > next.timestamp)
    throw std::invalid_argument("snapshot timestamps decrease (" + std::to_string(prev.timestamp) +
                                " > " + std::to_string(next.timestamp) + ")");
  SnapshotDiff d;
  if (prev.source == next.source) return d;
  ParseResult a = parse(prev.source);
  ParseResult b = parse(next.source);
  if (a.ok() && b.ok()) {
    d.edits = diff_programs(b.ast, a.ast, identity_mapping(b.ast, a.ast));
    return d;
  }
  d.parse_failed = true;
  d.lines = line_diff(prev.source, next.source);
  return d;
}

void SnapshotLog::append(CodeSnapshot s, int line) {
  auto& v = streams_[{s.student_id, s.exercise_id}];
  if (!v.empty() && s.timestamp < v.back().timestamp)
    throw IngestError("timestamp",
                      "snapshot at " + std::to_string(s.timestamp) + " precedes " +
                          std::to_string(v.back().timestamp) + " for student '" + s.student_id +
                          "', exercise '" + s.exercise_id + "'",
                      line);
  v.push_back(std::move(s));
}

const std::vector<CodeSnapshot>& SnapshotLog::stream(const std::string& student,
                                                     const std::string& exercise) const {
  static const std::vector<CodeSnapshot> empty;
  auto it = streams_.find({student, exercise});
  return it == streams_.end() ? empty : it->second;
}

std::vector<std::pair<std::string, std::string>> SnapshotLog::keys() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : streams_) out.push_back(k);
  return out;
}

// ---- gaze --------------------------------------------------------------------------

GazeSummary correlate_gaze(const std::vector<GazeEvent>& events,
                           const std::vector<CodeSnapshot>& snapshots, std::int64_t period) {
  GazeSummary g;
  size_t n = snapshots.size();
  std::vector<std::vector<SourceSpan>> changed(n);
  std::vector<int> lines(n);
  for (size_t i = 0; i < n; ++i) {
    lines[i] = line_count(snapshots[i].source);
    g.windows.push_back({static_cast<int>(i), snapshots[i].timestamp,
                         i + 1 < n ? snapshots[i + 1].timestamp : snapshots[i].timestamp + period,
                         {}});
    if (i + 1 >= n) continue;
    SnapshotDiff d = diff_snapshots(snapshots[i], snapshots[i + 1]);
    for (const auto& e : d.edits)
      if (e.reference_span.valid()) changed[i].push_back(e.reference_span);
    for (const auto& l : d.lines)
      if (!l.insert) changed[i].push_back({0, l.line, 1, l.line, 1 << 20});
  }

  std::vector<std::map<std::tuple<int, int, int, int>, FragmentDwell>> groups(n);
  for (const auto& ev : events) {
    ++g.events;
    auto it = std::upper_bound(snapshots.begin(), snapshots.end(), ev.timestamp,
                               [](std::int64_t t, const CodeSnapshot& s) { return t < s.timestamp; });
    if (it == snapshots.begin()) { ++g.dropped; continue; }
    size_t i = static_cast<size_t>(it - snapshots.begin()) - 1;
    if (ev.timestamp >= g.windows[i].end || ev.span.end_line > lines[i]) {
      ++g.dropped;
      continue;
    }
    bool hit = std::any_of(changed[i].begin(), changed[i].end(),
                           [&](const SourceSpan& s) { return overlaps(s, ev.span); });
    auto key = std::make_tuple(ev.span.start_line, ev.span.start_col, ev.span.end_line, ev.span.end_col);
    FragmentDwell& f = groups[i][key];
    f.span = ev.span;
    f.span.file_id = 0;
    f.dwell_ms += ev.dwell_ms;
    f.revisits++;
    f.changed = hit;
    g.total_ms += ev.dwell_ms;
    (hit ? g.changed_ms : g.unchanged_ms) += ev.dwell_ms;
  }
  for (size_t i = 0; i < n; ++i)
    for (auto& [k, f] : groups[i]) g.windows[i].fragments.push_back(f);
  return g;
}

// ---- surveys -----------------------------------------------------------------------

SurveyObservations survey_to_observations(const SurveyRecord& r, const Questionnaire& q,
                                          Emotion emotion, double social) {
  SurveyObservations out;
  RecallObservation& rec = out.recall;
  rec.emotion = emotion;
  rec.social = social;
  rec.attempts = 1;
  int agree = 0, judged = 0;
  std::optional<double> sim;
  for (const auto& [key, a] : r.answers) {
    for (const auto& question : q.questions)
      if (question.key == key) rec.concepts.insert(question.concepts.begin(), question.concepts.end());
    if (a.attempts) rec.attempts = std::max(rec.attempts, *a.attempts);
    for (const auto& e : a.errors) {
      rec.errors[e.concept_id]++;
      rec.concepts.insert(e.concept_id);
    }
    if (a.predicted_correct && a.observed_correct) {
      ++judged;
      if (*a.predicted_correct == *a.observed_correct) ++agree;
    }
    if (a.similarity && (q.similarity_key.empty() || key == q.similarity_key)) sim = a.similarity;
  }
  if (sim && !rec.concepts.empty()) {
    AdjustmentObservation adj;
    adj.exercise = r.exercise_id;
    adj.concepts = rec.concepts;
    adj.dsim = *sim;
    adj.imp = judged > 0 ? static_cast<double>(agree) / judged : 0.5;
    adj.emotion = emotion;
    adj.social = social;
    out.adjustment = adj;
  }
  return out;
}

// ---- file ingestion ----------------------------------------------------------------

namespace {

constexpr const char* kStreamNames[] = {"snapshots", "gaze", "emotion", "social", "survey"};

template <class E>
std::map<std::string, std::vector<std::pair<int, E>>> group_by(
    const std::vector<std::pair<int, E>>& events, std::string E::*who) {
  std::map<std::string, std::vector<std::pair<int, E>>> out;
  for (const auto& e : events) out[e.second.*who].push_back(e);
  return out;
}

}  // namespace

const char* stream_kind_name(StreamKind k) { return kStreamNames[static_cast<int>(k)]; }

std::optional<StreamKind> stream_kind_from_name(std::string_view s) {
  for (int i = 0; i < 5; ++i)
    if (s == kStreamNames[i]) return static_cast<StreamKind>(i);
  return std::nullopt;
}

IngestReport ingest_file(SlaStore& store, StreamKind kind, const std::string& path,
                         const IngestContext& ctx) {
  IngestReport rep;
  rep.kind = kind;
  rep.path = path;
  std::string content = read_file(path);
  rep.hash = hex64(fnv1a64(content));
  auto lines = parse_jsonl(content);
  rep.read = static_cast<int>(lines.size());

  // Apply `f` to each student's record unless this file already went in.
  auto apply = [&](const std::string& student, int count, auto&& f) {
    rep.students.push_back(student);
    store.update(student, [&](SlaRecord& r) {
      if (already_ingested(r, rep.hash)) {
        rep.duplicate += count;
        return;
      }
      f(r);
      r.log.push_back({"ingest", json{{"kind", stream_kind_name(kind)}, {"hash", rep.hash},
                                      {"events", count}}.dump()});
    });
  };

  switch (kind) {
    case StreamKind::Snapshots: {
      std::vector<std::pair<int, CodeSnapshot>> evs;
      SnapshotLog log;
      for (auto& [n, j] : lines) {
        CodeSnapshot s = snapshot_from_json(j, n);
        log.append(s, n);
        evs.emplace_back(n, std::move(s));
      }
      auto by = group_by(evs, &CodeSnapshot::student_id);
      for (auto& [student, list] : by) {
        SlaRecord current = store.load(student);
        if (already_ingested(current, rep.hash)) continue;
        std::set<std::string> checked;  // later ones are ordered within the file
        for (const auto& [n, s] : list) {
          if (!checked.insert(s.exercise_id).second) continue;
          auto last = last_snapshot_time(current, s.exercise_id);
          if (last && s.timestamp < *last)
            throw IngestError("timestamp", "snapshot at " + std::to_string(s.timestamp) +
                                               " precedes stored snapshot at " + std::to_string(*last),
                              n);
        }
      }
      for (auto& [student, list] : by) {
        apply(student, static_cast<int>(list.size()), [&](SlaRecord& r) {
          std::map<std::string, const CodeSnapshot*> prev;
          for (const auto& [n, s] : list) {
            json p{{"exercise", s.exercise_id}, {"timestamp", s.timestamp},
                   {"source_hash", hex64(fnv1a64(s.source))}};
            auto it = prev.find(s.exercise_id);
            if (it != prev.end()) {
              SnapshotDiff d = diff_snapshots(*it->second, s);
              p["edits"] = d.edits.size();
              p["line_edits"] = d.lines.size();
              p["parse_failed"] = d.parse_failed;
            } else {
              p["edits"] = 0;
              p["baseline"] = true;
            }
            prev[s.exercise_id] = &s;
            r.log.push_back({"snapshot", p.dump()});
            ++rep.applied;
          }
        });
      }
      break;
    }
    case StreamKind::Gaze: {
      std::vector<std::pair<int, GazeEvent>> evs;
      for (auto& [n, j] : lines) evs.emplace_back(n, gaze_from_json(j, n));
      for (auto& [student, list] : group_by(evs, &GazeEvent::student_id)) {
        std::vector<GazeEvent> mine;
        for (auto& e : list) mine.push_back(e.second);
        std::vector<CodeSnapshot> snaps;
        for (const auto& s : ctx.snapshots)
          if (s.student_id == student) snaps.push_back(s);
        std::stable_sort(snaps.begin(), snaps.end(),
                         [](const CodeSnapshot& a, const CodeSnapshot& b) { return a.timestamp < b.timestamp; });
        GazeSummary g = correlate_gaze(mine, snaps, ctx.sampling_period);
        apply(student, g.events, [&](SlaRecord& r) {
          json p{{"events", g.events}, {"dropped", g.dropped}, {"total_ms", g.total_ms},
                 {"changed_ms", g.changed_ms}, {"unchanged_ms", g.unchanged_ms}};
          json wins = json::array();
          for (const auto& w : g.windows) {
            json frags = json::array();
            for (const auto& f : w.fragments)
              frags.push_back({{"span", span_json(f.span)}, {"dwell_ms", f.dwell_ms},
                               {"revisits", f.revisits}, {"changed", f.changed}});
            wins.push_back({{"start", w.start}, {"end", w.end}, {"fragments", frags}});
          }
          p["windows"] = wins;
          r.log.push_back({"gaze", p.dump()});
          rep.applied += g.events - g.dropped;
          rep.dropped += g.dropped;
        });
        if (g.dropped > 0)
          rep.warnings.push_back(student + ": " + std::to_string(g.dropped) +
                                 " gaze events outside every snapshot window");
      }
      break;
    }
    case StreamKind::Emotion: {
      std::vector<std::pair<int, EmotionEvent>> evs;
      for (auto& [n, j] : lines) evs.emplace_back(n, emotion_from_json(j, n));
      for (auto& [student, list] : group_by(evs, &EmotionEvent::speaker_id)) {
        apply(student, static_cast<int>(list.size()), [&](SlaRecord& r) {
          for (const auto& [n, e] : list) {
            record_emotion(r, e.label, e.confidence, e.timestamp);
            ++rep.applied;
          }
        });
      }
      break;
    }
    case StreamKind::Social: {
      std::vector<std::pair<int, SocialEvent>> evs;
      double total = 0.0;
      for (auto& [n, j] : lines) {
        evs.emplace_back(n, social_from_json(j, n));
        total += evs.back().second.duration_s;
      }
      // Each speaker's share of the speaking time in this session.
      for (auto& [student, list] : group_by(evs, &SocialEvent::speaker_id)) {
        double mine = 0.0;
        std::int64_t last = 0;
        for (const auto& [n, e] : list) {
          mine += e.duration_s;
          last = std::max(last, e.timestamp);
        }
        double share = total > 0 ? mine / total : 0.0;
        apply(student, static_cast<int>(list.size()), [&](SlaRecord& r) {
          record_social(r, share, last);
          rep.applied += static_cast<int>(list.size());
        });
      }
      break;
    }
    case StreamKind::Survey: {
      std::map<std::string, Questionnaire> questionnaires;
      std::vector<std::pair<int, SurveyRecord>> evs;
      for (auto& [n, j] : lines) {
        std::string ex = j.is_object() && j.contains("exercise_id") && j["exercise_id"].is_string()
                             ? j["exercise_id"].get<std::string>()
                             : "";
        auto it = ctx.exercises.find(ex);
        if (it == ctx.exercises.end())
          throw IngestError("exercise_id", "unknown exercise '" + ex + "'", n);
        if (it->second.survey_path.empty())
          throw IngestError("exercise_id", "exercise '" + ex + "' has no questionnaire", n);
        if (!questionnaires.count(ex)) questionnaires[ex] = load_questionnaire(it->second.survey_path);
        evs.emplace_back(n, survey_from_json(j, questionnaires[ex], n));
      }
      for (auto& [student, list] : group_by(evs, &SurveyRecord::student_id)) {
        apply(student, static_cast<int>(list.size()), [&](SlaRecord& r) {
          for (const auto& [n, rec] : list) {
            const Questionnaire& q = questionnaires[rec.exercise_id];
            SurveyObservations obs =
                survey_to_observations(rec, q, dominant_emotion(r), social_share(r));
            if (!obs.recall.concepts.empty()) update_recall(r, obs.recall, ctx.params);
            if (obs.adjustment) update_adjustment(r, *obs.adjustment, ctx.params);
            json texts = json::object();
            for (const auto& [k, a] : rec.answers) {
              texts[k] = a.text;
              for (const auto& e : a.errors) r.error_types[e.kind]++;
            }
            r.log.push_back({"survey", json{{"exercise", rec.exercise_id},
                                            {"timestamp", rec.timestamp},
                                            {"answers", texts}}.dump()});
            ++rep.applied;
          }
        });
      }
      break;
    }
  }
  std::sort(rep.students.begin(), rep.students.end());
  return rep;
}

}  // namespace cdiag
