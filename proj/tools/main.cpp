// cdiag: parse, diagnose, simulate, sla, ingest, mutate and bench subcommands.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdiag/ast_json.hpp"
#include "cdiag/config.hpp"
#include "cdiag/corpus.hpp"
#include "cdiag/dialog.hpp"
#include "cdiag/fixture.hpp"
#include "cdiag/ingest.hpp"
#include "cdiag/parser.hpp"
#include "cdiag/pipeline.hpp"
#include "cdiag/report_json.hpp"
#include "cdiag/sla.hpp"

using namespace cdiag;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

/// Bad input named by the user: missing files, malformed documents.
struct InputError : std::runtime_error {
  InputError(const std::string& what, std::string key = {})
      : std::runtime_error(what), key(std::move(key)) {}
  std::string key;
};

int fail(int code, const std::string& kind, const std::string& message, const std::string& key = {}) {
  json e = {{"kind", kind}, {"message", message}};
  if (!key.empty()) e["key"] = key;
  std::cerr << json{{"error", e}}.dump() << "\n";
  return code;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
}

Config load_options(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

std::vector<std::string> fixture_dirs() {
  std::vector<std::string> dirs;
  for (const auto& e : fs::directory_iterator(shipped_fixtures_dir()))
    if (fs::exists(e.path() / "exercise.json")) dirs.push_back(e.path().string());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

// ---- parse -----------------------------------------------------------------------

struct ParseArgs {
  std::string file;
  bool dump_ast = false;
};

int run_parse(const ParseArgs& a) {
  ParseResult r = parse(read_file(a.file));
  json j = parse_result_json(r);
  if (!a.dump_ast) j.erase("ast");
  emit(j);
  return r.ok() ? kOk : kInput;
}

// ---- diagnose --------------------------------------------------------------------

struct DiagnoseArgs {
  std::string student, reference, tests, exercise, config, data_dir;
  std::string student_id = "anonymous";
  bool dump_trace = false;
};

Exercise exercise_from_files(const std::string& reference, const std::string& tests) {
  Exercise ex;
  ex.id = fs::path(reference).stem().string();
  ex.dir = fs::path(reference).parent_path().string();
  ex.reference_source = read_file(reference);
  ParseResult pr = parse(ex.reference_source);
  if (!pr.ok()) throw InputError(reference + ": reference does not parse: " + pr.errors.front().message);
  ex.reference = std::move(pr.ast);
  ex.tests = tests_from_json(read_json(tests));
  return ex;
}

int run_diagnose(const DiagnoseArgs& a) {
  Config cfg = load_options(a.config);
  Exercise ex;
  if (!a.exercise.empty()) {
    ex = load_exercise(a.exercise);
  } else {
    if (a.reference.empty() || a.tests.empty())
      return fail(kUsage, "usage", "diagnose needs --exercise or both --reference and --tests");
    ex = exercise_from_files(a.reference, a.tests);
  }
  std::string source = read_file(a.student);

  if (a.dump_trace) {
    ParseResult pr = parse(source);
    if (!pr.ok()) throw InputError(a.student + ": does not parse: " + pr.errors.front().message);
    for (const auto& t : run_suite_serial(pr.ast, ex.tests, cfg.exec))
      for (const auto& line : trace_lines(t)) std::cout << line.dump() << "\n";
    return kOk;
  }

  std::optional<SlaStore> store;
  SlaRecord sla = empty_record(a.student_id);
  if (!a.data_dir.empty()) {
    store.emplace(a.data_dir);
    sla = store->load(a.student_id);
  }
  DiagnoseOptions opt;
  opt.classifier = cfg.classifier;
  opt.match.exec = cfg.exec;
  SubmissionReport rep = diagnose_submission(source, ex, sla, opt);
  if (store) {
    store->update(a.student_id, [&](SlaRecord& r) {
      for (const auto& c : rep.classifications)
        record_error(r, c.concept_id, c.component, category_name(c.category), c.severity_delta);
    });
  }
  emit(report_json(rep));
  return kOk;
}

// ---- simulate --------------------------------------------------------------------

struct SimulateArgs {
  std::string exercise, profile, config, emotion = "neutral", data_dir, student_id;
  std::uint64_t seed = 0;
  std::optional<int> max_iter;
  std::optional<double> alpha, beta, lambda;
  double learn_rate = 1.0;
};

int run_simulate(const SimulateArgs& a) {
  Config cfg = load_options(a.config);
  DialogParams p = cfg.dialog;
  if (a.max_iter) p.max_iteration = *a.max_iter;
  if (a.alpha) p.alpha = *a.alpha;
  if (a.beta) p.beta = *a.beta;
  if (a.lambda) p.lambda = *a.lambda;
  if (p.max_iteration < 1 || p.alpha <= 0 || p.beta <= 0 || p.lambda <= 0)
    return fail(kUsage, "usage", "--max-iter, --alpha, --beta and --lambda must be positive");
  auto emotion = emotion_from_name(a.emotion);
  if (!emotion) return fail(kUsage, "usage", "unknown emotion '" + a.emotion + "'", "emotion");
  if (a.learn_rate < 0 || a.learn_rate > 1) return fail(kUsage, "usage", "--learn-rate must lie in [0, 1]");

  Exercise ex = load_exercise(a.exercise);
  MisunderstandingProfile profile;
  try {
    profile = profile_from_json(read_json(a.profile));
  } catch (const std::invalid_argument& e) {
    throw InputError(a.profile + ": " + e.what());
  }
  QuestionGraph g = build_question_graph(ex);
  ResponseOracle oracle(ex, g);

  SimulatedStudent st;
  st.delta = severities_of(profile);
  st.learn_rate = a.learn_rate;
  st.emotion = *emotion;
  st.seed = a.seed;

  std::optional<SlaStore> store;
  TransitionMatrix transitions(3 * kConceptCount, cfg.sla.smoothing);
  if (!a.data_dir.empty()) {
    if (a.student_id.empty()) return fail(kUsage, "usage", "--data-dir needs --student-id");
    store.emplace(a.data_dir);
    transitions = store->load(a.student_id).questions;
  }
  DialogTranscript tr = run_dialog(st, oracle, p, transitions);
  if (store) store->update(a.student_id, [&](SlaRecord& r) { r.questions = tr.transitions; });
  emit(transcript_json(tr, g));
  return kOk;
}

// ---- sla -------------------------------------------------------------------------

int run_sla_show(const std::string& data_dir, const std::string& id) {
  SlaStore store(data_dir);
  if (!fs::exists(store.path_for(id))) throw InputError("no record for student '" + id + "' in " + data_dir, "id");
  std::cout << to_json_text(store.load(id)) << "\n";
  return kOk;
}

int run_sla_report(const std::string& data_dir) {
  SlaStore store(data_dir);
  std::vector<SlaRecord> records;
  for (const auto& id : store.students()) records.push_back(store.load(id));
  CohortReport c = cohort_report(records);
  json recall = json::object();
  for (const auto& [k, v] : c.mean_recall) recall[std::string(concept_name(k))] = v;
  emit({{"students", c.students}, {"mean_recall", recall}, {"error_types", c.error_types}});
  return kOk;
}

// ---- ingest ----------------------------------------------------------------------

struct IngestArgs {
  std::string kind, file, data_dir, snapshots, config;
  std::vector<std::string> exercises;
};

int run_ingest(const IngestArgs& a) {
  auto kind = stream_kind_from_name(a.kind);
  if (!kind) return fail(kUsage, "usage", "unknown stream kind '" + a.kind + "'", "kind");
  Config cfg = load_options(a.config);
  IngestContext ctx;
  ctx.params = cfg.sla;
  ctx.sampling_period = cfg.sampling_period;
  for (const auto& dir : a.exercises.empty() ? fixture_dirs() : a.exercises) {
    Exercise ex = load_exercise(dir);
    ctx.exercises.emplace(ex.id, std::move(ex));
  }
  if (!a.snapshots.empty())
    for (const auto& [line, j] : read_jsonl(a.snapshots)) ctx.snapshots.push_back(snapshot_from_json(j, line));
  SlaStore store(a.data_dir);
  IngestReport r = ingest_file(store, *kind, a.file, ctx);
  emit({{"kind", stream_kind_name(r.kind)},
        {"path", r.path},
        {"hash", r.hash},
        {"read", r.read},
        {"applied", r.applied},
        {"dropped", r.dropped},
        {"duplicate", r.duplicate},
        {"students", r.students},
        {"warnings", r.warnings}});
  if (!r.reconciles()) return fail(kInternal, "internal", "ingest counts do not reconcile");
  return kOk;
}

// ---- mutate ----------------------------------------------------------------------

struct MutateArgs {
  std::string exercise, category, op, concept_name, output;
  std::uint64_t seed = 0;
  bool list = false;
};

int run_mutate(const MutateArgs& a) {
  Exercise ex = load_exercise(a.exercise);
  std::optional<MutationCategory> cat;
  if (!a.category.empty()) {
    cat = mutation_category_from_name(a.category);
    if (!cat) return fail(kUsage, "usage", "unknown category '" + a.category + "'", "category");
  }
  std::optional<ConceptId> target;
  if (!a.concept_name.empty()) {
    target = concept_from_name(a.concept_name);
    if (!target) return fail(kUsage, "usage", "unknown concept '" + a.concept_name + "'", "concept");
  }
  if (!a.op.empty()) {
    const OperatorInfo* info = find_operator(a.op);
    if (!info) return fail(kUsage, "usage", "unknown operator '" + a.op + "'", "operator");
    if (cat && info->category != *cat)
      return fail(kUsage, "usage", "operator '" + a.op + "' belongs to " + mutation_category_name(info->category),
                  "operator");
    if (!cat) cat = info->category;
  }

  if (a.list) {
    json sites = json::array();
    for (const auto& info : mutation_operators()) {
      if ((cat && info.category != *cat) || (!a.op.empty() && info.id != a.op)) continue;
      for (const auto& s : mutation_sites(ex.reference, info.id)) {
        if (target && s.concept_id != *target) continue;
        sites.push_back({{"operator", s.op},
                         {"category", mutation_category_name(info.category)},
                         {"node", s.node_id},
                         {"variant", s.variant},
                         {"concept", std::string(concept_name(s.concept_id))},
                         {"description", s.description}});
      }
    }
    emit(sites);
    return kOk;
  }
  MutationSpec spec;
  spec.category = *cat;
  spec.op = a.op;
  spec.seed = a.seed;
  spec.target = target;
  Mutant m = mutate(ex.reference, spec);
  if (!a.output.empty()) {
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw InputError("cannot write " + a.output);
    out << m.source;
  }
  emit({{"exercise", ex.id},
        {"operator", m.op},
        {"category", mutation_category_name(m.category)},
        {"concept", std::string(concept_name(m.concept_id))},
        {"description", m.site.description},
        {"parses", m.parses},
        {"seed", a.seed},
        {"source", m.source}});
  return kOk;
}

// ---- bench -----------------------------------------------------------------------

struct BenchArgs {
  std::string category;
  int n = 50;
  std::uint64_t seed = 1;
  bool serial = false, as_json = false;
};

int run_bench(const BenchArgs& a) {
  std::optional<MutationCategory> only;
  if (!a.category.empty()) {
    only = mutation_category_from_name(a.category);
    if (!only) return fail(kUsage, "usage", "unknown category '" + a.category + "'", "category");
  }
  if (a.n < 1) return fail(kUsage, "usage", "-n must be positive");
  std::vector<Exercise> exercises;
  for (const auto& dir : fixture_dirs()) exercises.push_back(load_exercise(dir));

  auto t0 = std::chrono::steady_clock::now();
  Corpus corpus = build_corpus(exercises, {a.n, a.seed});
  if (only)
    std::erase_if(corpus.entries, [&](const CorpusEntry& e) { return e.mutant.category != *only; });
  CorpusResult r = a.serial ? classify_corpus_serial(corpus, exercises) : classify_corpus_parallel(corpus, exercises);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (a.as_json) {
    json rows = json::array();
    for (const auto& [c, v] : r.per_category)
      rows.push_back({{"category", mutation_category_name(c)},
                      {"correct", v.first},
                      {"total", v.second},
                      {"available", corpus.available[c]}});
    emit({{"seed", a.seed}, {"per_category", rows}, {"correct", r.correct},
          {"total", static_cast<int>(corpus.entries.size())}, {"accuracy", r.accuracy()}, {"seconds", secs}});
  } else {
    std::printf("%-14s %8s %8s %9s %10s\n", "category", "correct", "total", "accuracy", "available");
    for (const auto& [c, v] : r.per_category)
      std::printf("%-14s %8d %8d %9.3f %10d\n", mutation_category_name(c), v.first, v.second,
                  v.second ? static_cast<double>(v.first) / v.second : 0.0, corpus.available[c]);
    std::printf("%-14s %8d %8zu %9.3f\n", "all", r.correct, corpus.entries.size(), r.accuracy());
    std::printf("time %.2f s (%s)\n", secs, a.serial ? "serial" : "parallel");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagnose misconceptions in introductory C programs"};
  app.require_subcommand(1);

  ParseArgs pa;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a C file and report errors or the AST");
  parse_cmd->add_option("file", pa.file, "C source file")->required();
  parse_cmd->add_flag("--dump-ast", pa.dump_ast, "Include the AST in the output");

  DiagnoseArgs da;
  auto* diag_cmd = app.add_subcommand("diagnose", "Compare a submission with a reference and classify mismatches");
  diag_cmd->add_option("--student", da.student, "Student C file")->required();
  diag_cmd->add_option("--reference", da.reference, "Reference C file");
  diag_cmd->add_option("--tests", da.tests, "Test cases JSON");
  diag_cmd->add_option("--exercise", da.exercise, "Exercise fixture directory (instead of --reference/--tests)");
  diag_cmd->add_option("--student-id", da.student_id, "Student id for the SLA record");
  diag_cmd->add_option("--data-dir", da.data_dir, "SLA store to read and update");
  diag_cmd->add_option("--config", da.config, "Config JSON");
  diag_cmd->add_flag("--dump-trace", da.dump_trace, "Print the student's traces as JSON lines instead");

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the diagnostic dialog against a simulated student");
  sim_cmd->add_option("--exercise", sa.exercise, "Exercise fixture directory")->required();
  sim_cmd->add_option("--profile", sa.profile, "Misunderstanding profile JSON")->required();
  sim_cmd->add_option("--seed", sa.seed, "Seed recorded in the transcript");
  sim_cmd->add_option("--max-iter", sa.max_iter, "Iteration cap (default 20)");
  sim_cmd->add_option("--alpha", sa.alpha, "Weight of the predicted distance");
  sim_cmd->add_option("--beta", sa.beta, "Weight of the severity gap");
  sim_cmd->add_option("--lambda", sa.lambda, "Likelihood temperature");
  sim_cmd->add_option("--learn-rate", sa.learn_rate, "Simulated student's learn rate");
  sim_cmd->add_option("--emotion", sa.emotion, "Simulated student's emotion");
  sim_cmd->add_option("--data-dir", sa.data_dir, "SLA store holding the question transitions");
  sim_cmd->add_option("--student-id", sa.student_id, "Student whose transitions are used");
  sim_cmd->add_option("--config", sa.config, "Config JSON");

  std::string sla_dir = "sla-data", sla_id;
  auto* sla_cmd = app.add_subcommand("sla", "Inspect stored student records");
  sla_cmd->require_subcommand(1);
  auto* show_cmd = sla_cmd->add_subcommand("show", "Print one student's record");
  show_cmd->add_option("id", sla_id, "Student id")->required();
  show_cmd->add_option("--data-dir", sla_dir, "SLA store");
  auto* report_cmd = sla_cmd->add_subcommand("report", "Cohort aggregates");
  report_cmd->add_option("--data-dir", sla_dir, "SLA store");

  IngestArgs ia;
  ia.data_dir = "sla-data";
  auto* ingest_cmd = app.add_subcommand("ingest", "Ingest an event stream (JSON lines)");
  ingest_cmd->add_option("kind", ia.kind, "snapshots | gaze | emotion | social | survey")->required();
  ingest_cmd->add_option("file", ia.file, "JSON lines file")->required();
  ingest_cmd->add_option("--data-dir", ia.data_dir, "SLA store");
  ingest_cmd->add_option("--exercise", ia.exercises, "Exercise directories (default: shipped fixtures)");
  ingest_cmd->add_option("--snapshots", ia.snapshots, "Snapshot stream defining gaze windows");
  ingest_cmd->add_option("--config", ia.config, "Config JSON");

  MutateArgs ma;
  auto* mutate_cmd = app.add_subcommand("mutate", "Seed a labeled fault into an exercise reference");
  mutate_cmd->add_option("--exercise", ma.exercise, "Exercise fixture directory")->required();
  mutate_cmd->add_option("--category", ma.category, "recall | extension | modification | sequence");
  mutate_cmd->add_option("--operator", ma.op, "Operator id");
  mutate_cmd->add_option("--concept", ma.concept_name, "Restrict to sites of this concept");
  mutate_cmd->add_option("--seed", ma.seed, "Site choice seed");
  mutate_cmd->add_option("--output", ma.output, "Also write the mutant source here");
  mutate_cmd->add_flag("--list", ma.list, "List every applicable site instead");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Classify the seeded mutation corpus and print accuracy");
  bench_cmd->add_option("--category", ba.category, "Only this category");
  bench_cmd->add_option("-n", ba.n, "Mutants per category");
  bench_cmd->add_option("--seed", ba.seed, "Corpus seed");
  bench_cmd->add_flag("--serial", ba.serial, "Classify without OpenMP");
  bench_cmd->add_flag("--json", ba.as_json, "Print JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }
  if (mutate_cmd->parsed() && !ma.list && ma.category.empty() && ma.op.empty())
    return fail(kUsage, "usage", "mutate needs --category, --operator or --list");

  try {
    if (parse_cmd->parsed()) return run_parse(pa);
    if (diag_cmd->parsed()) return run_diagnose(da);
    if (sim_cmd->parsed()) return run_simulate(sa);
    if (show_cmd->parsed()) return run_sla_show(sla_dir, sla_id);
    if (report_cmd->parsed()) return run_sla_report(sla_dir);
    if (ingest_cmd->parsed()) return run_ingest(ia);
    if (mutate_cmd->parsed()) return run_mutate(ma);
    if (bench_cmd->parsed()) return run_bench(ba);
  } catch (const InputError& e) {
    return fail(kInput, "input", e.what(), e.key);
  } catch (const IngestError& e) {
    return fail(kInput, "input", e.what(), e.key());
  } catch (const ConfigError& e) {
    return fail(kInput, "input", e.what(), e.key());
  } catch (const SchemaViolation& e) {
    return fail(kInput, "input", e.what(), e.field());
  } catch (const FixtureError& e) {
    return fail(kInput, "input", e.what());
  } catch (const OperatorNotApplicable& e) {
    return fail(kInput, "input", e.what());
  } catch (const json::exception& e) {
    return fail(kInput, "input", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kInput, "input", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(kInput, "input", e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, "internal", e.what());
  }
  return fail(kUsage, "usage", "no subcommand");
}
