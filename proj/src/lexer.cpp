#include "lexer.hpp"

#include <array>
#include <cctype>
#include <cstdlib>

namespace cdiag::detail {

namespace {

constexpr std::array<std::string_view, 14> kKeywords = {
    "int", "unsigned", "char", "float", "void", "if", "else", "while",
    "for", "return", "break", "FILE", "struct", "do"};

// Longest first so that maximal munch works with a linear scan.
constexpr std::array<std::string_view, 37> kPuncts = {
    "<<=", ">>=", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
    "/=",  "%=",  "&=", "|=", "^=", "<<", ">>", "->", "+",  "-",  "*",  "/",  "%",
    "&",   "|",   "^",  "~",  "!",  "<",  ">",  "=",  ";",  ",",  "."};

constexpr std::string_view kSingle = "(){}[]";

bool is_keyword(std::string_view s) {
  for (auto k : kKeywords)
    if (k == s) return true;
  return false;
}

class Lexer {
 public:
  Lexer(std::string_view src, int file_id, std::vector<ParseError>& errors)
      : src_(src), file_id_(file_id), errors_(errors) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      Token t;
      int sl = line_, sc = col_;
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string s;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          s += advance();
        t.kind = is_keyword(s) ? Tok::Keyword : Tok::Ident;
        t.text = s;
        t.spelling = s;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(t);
      } else if (c == '\'') {
        lex_char(t);
      } else if (c == '"') {
        lex_string(t);
      } else if (kSingle.find(c) != std::string_view::npos) {
        t.kind = Tok::Punct;
        t.text = std::string(1, advance());
        t.spelling = t.text;
      } else {
        bool matched = false;
        for (auto p : kPuncts) {
          if (src_.substr(pos_, p.size()) == p) {
            for (size_t i = 0; i < p.size(); ++i) advance();
            t.kind = Tok::Punct;
            t.text = std::string(p);
            t.spelling = t.text;
            matched = true;
            break;
          }
        }
        if (!matched) {
          advance();
          error(sl, sc, std::string("unexpected character '") + c + "'");
          continue;
        }
      }
      t.span = {file_id_, sl, sc, last_line_, last_col_};
      out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.text = "<end of input>";
    end.span = {file_id_, line_, col_, line_, col_};
    out.push_back(end);
    return out;
  }

 private:
  char advance() {
    char c = src_[pos_++];
    last_line_ = line_;
    last_col_ = col_;
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void error(int line, int col, std::string msg) {
    errors_.push_back({ErrorKind::Lexical, {file_id_, line, col, line, col}, std::move(msg),
                       ConceptId::LoopControl});
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        int sl = line_, sc = col_;
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) {
          error(sl, sc, "unterminated comment");
          return;
        }
        advance();
        advance();
      } else if (c == '#' && at_line_start()) {
        int sl = line_, sc = col_;
        std::string directive;
        while (pos_ < src_.size() && src_[pos_] != '\n') directive += advance();
        if (directive.rfind("#include", 0) != 0)
          errors_.push_back({ErrorKind::Semantic,
                             {file_id_, sl, sc, sl, sc + static_cast<int>(directive.size()) - 1},
                             "unsupported construct: preprocessor directive",
                             ConceptId::LoopControl});
      } else {
        return;
      }
    }
  }

  bool at_line_start() const {
    for (size_t i = pos_; i-- > 0;) {
      if (src_[i] == '\n') return true;
      if (!std::isspace(static_cast<unsigned char>(src_[i]))) return false;
    }
    return true;
  }

  void lex_number(Token& t) {
    std::string s;
    bool is_float = false;
    if (src_.substr(pos_, 2) == "0x" || src_.substr(pos_, 2) == "0X") {
      s += advance();
      s += advance();
      while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_])))
        s += advance();
    } else {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        s += advance();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        is_float = true;
        s += advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          s += advance();
      }
    }
    while (pos_ < src_.size() && (src_[pos_] == 'u' || src_[pos_] == 'U')) s += advance();
    t.spelling = s;
    t.text = s;
    if (is_float) {
      t.kind = Tok::FloatLit;
      t.float_value = std::strtod(s.c_str(), nullptr);
    } else {
      t.kind = Tok::IntLit;
      t.int_value = static_cast<std::int64_t>(std::strtoull(s.c_str(), nullptr, 0));
    }
  }

  // Returns false on an invalid escape.
  bool lex_escape(std::string& payload, std::string& spelling) {
    spelling += advance();  // backslash
    if (pos_ >= src_.size()) return false;
    char e = advance();
    spelling += e;
    switch (e) {
      case 'n': payload += '\n'; return true;
      case 't': payload += '\t'; return true;
      case 'r': payload += '\r'; return true;
      case '0': payload += '\0'; return true;
      case '\\': payload += '\\'; return true;
      case '\'': payload += '\''; return true;
      case '"': payload += '"'; return true;
      default: return false;
    }
  }

  void lex_char(Token& t) {
    int sl = line_, sc = col_;
    std::string spelling(1, advance());
    std::string payload;
    while (pos_ < src_.size() && src_[pos_] != '\'' && src_[pos_] != '\n') {
      if (src_[pos_] == '\\') {
        if (!lex_escape(payload, spelling)) error(sl, sc, "invalid escape sequence");
      } else {
        char c = advance();
        payload += c;
        spelling += c;
      }
    }
    if (pos_ < src_.size() && src_[pos_] == '\'') {
      spelling += advance();
    } else {
      error(sl, sc, "unterminated character literal");
    }
    if (payload.size() != 1) error(sl, sc, "character literal must hold exactly one character");
    t.kind = Tok::CharLit;
    t.text = payload;
    t.spelling = spelling;
    t.int_value = payload.empty() ? 0 : static_cast<unsigned char>(payload[0]);
  }

  void lex_string(Token& t) {
    int sl = line_, sc = col_;
    std::string spelling(1, advance());
    std::string payload;
    while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
      if (src_[pos_] == '\\') {
        if (!lex_escape(payload, spelling)) error(sl, sc, "invalid escape sequence");
      } else {
        char c = advance();
        payload += c;
        spelling += c;
      }
    }
    if (pos_ < src_.size() && src_[pos_] == '"') {
      spelling += advance();
    } else {
      error(sl, sc, "unterminated string literal");
    }
    t.kind = Tok::StringLit;
    t.text = payload;
    t.spelling = spelling;
  }

  std::string_view src_;
  int file_id_;
  std::vector<ParseError>& errors_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int last_line_ = 1;
  int last_col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src, int file_id, std::vector<ParseError>& errors) {
  return Lexer(src, file_id, errors).run();
}

std::string escape_c(std::string_view payload, char quote) {
  std::string out;
  for (char c : payload) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c == quote) {
          out += '\\';
          out += c;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace cdiag::detail
