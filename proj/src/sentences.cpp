#include "refiner/prover/sentences.hpp"

#include <cctype>

#include "refiner/core/text.hpp"

namespace refiner {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_bullet_char(char c) { return c == '-' || c == '+' || c == '*'; }

// Scans the raw script and produces sentence spans plus comment-free text.
class Splitter {
 public:
  explicit Splitter(std::string_view src) : src_(src) {}

  std::vector<Sentence> run() {
    std::size_t i = 0;
    while (i < src_.size()) {
      i = skip_trivia(i);
      if (i >= src_.size()) break;
      std::size_t start = i;
      char c = src_[i];
      if (c == '{' || c == '}') {
        emit(start, i + 1);
        i = i + 1;
        continue;
      }
      if (is_bullet_char(c) && !(c == '*' && i + 1 < src_.size() && src_[i + 1] == ')')) {
        std::size_t j = i;
        while (j < src_.size() && src_[j] == c) ++j;
        emit(start, j);
        i = j;
        continue;
      }
      i = scan_sentence(i);
      emit(start, i);
    }
    return std::move(out_);
  }

 private:
  // Skips whitespace and comments between sentences.
  std::size_t skip_trivia(std::size_t i) {
    while (i < src_.size()) {
      if (is_space(src_[i])) {
        ++i;
      } else if (starts_comment(i)) {
        i = skip_comment(i);
      } else {
        break;
      }
    }
    return i;
  }

  bool starts_comment(std::size_t i) const {
    return i + 1 < src_.size() && src_[i] == '(' && src_[i + 1] == '*';
  }

  std::size_t skip_comment(std::size_t i) {
    int depth = 0;
    while (i < src_.size()) {
      if (starts_comment(i)) {
        ++depth;
        i += 2;
      } else if (i + 1 < src_.size() && src_[i] == '*' && src_[i + 1] == ')') {
        --depth;
        i += 2;
        if (depth == 0) return i;
      } else if (src_[i] == '"') {
        i = skip_string(i);
      } else {
        ++i;
      }
    }
    return i;
  }

  std::size_t skip_string(std::size_t i) {
    ++i;
    while (i < src_.size()) {
      if (src_[i] == '"') {
        // "" is an escaped quote inside a string literal.
        if (i + 1 < src_.size() && src_[i + 1] == '"') {
          i += 2;
          continue;
        }
        return i + 1;
      }
      ++i;
    }
    return i;
  }

  // Returns one past the terminating '.'.
  std::size_t scan_sentence(std::size_t i) {
    while (i < src_.size()) {
      if (starts_comment(i)) {
        i = skip_comment(i);
      } else if (src_[i] == '"') {
        i = skip_string(i);
      } else if (src_[i] == '.') {
        if (i + 1 >= src_.size() || is_space(src_[i + 1])) return i + 1;
        ++i;
      } else {
        ++i;
      }
    }
    return i;
  }

  void emit(std::size_t begin, std::size_t end) {
    Sentence s;
    s.begin = begin;
    s.end = end;
    s.text = text::normalize_ws(strip_comments(src_.substr(begin, end - begin)));
    if (!s.text.empty()) out_.push_back(std::move(s));
  }

  std::string_view src_;
  std::vector<Sentence> out_;
};

}  // namespace

std::string strip_comments(std::string_view script) {
  std::string out;
  out.reserve(script.size());
  std::size_t i = 0;
  int depth = 0;
  bool in_string = false;
  while (i < script.size()) {
    char c = script[i];
    if (depth == 0 && c == '"') {
      in_string = !in_string;
      out.push_back(c);
      ++i;
      continue;
    }
    if (in_string) {
      out.push_back(c);
      ++i;
      continue;
    }
    if (c == '(' && i + 1 < script.size() && script[i + 1] == '*') {
      ++depth;
      i += 2;
      continue;
    }
    if (depth > 0 && c == '*' && i + 1 < script.size() && script[i + 1] == ')') {
      --depth;
      i += 2;
      if (depth == 0) out.push_back(' ');
      continue;
    }
    if (depth == 0) out.push_back(c);
    ++i;
  }
  return out;
}

std::vector<Sentence> split_sentences(std::string_view script) { return Splitter(script).run(); }

std::vector<std::string> sentence_texts(std::string_view script) {
  std::vector<std::string> out;
  for (auto& s : split_sentences(script)) out.push_back(std::move(s.text));
  return out;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  }
  return out;
}

std::string normalize_script(std::string_view script) {
  return join_sentences(sentence_texts(script));
}

bool is_bullet(std::string_view s) {
  if (s == "{" || s == "}") return true;
  if (s.empty() || !is_bullet_char(s.front())) return false;
  for (char c : s)
    if (c != s.front()) return false;
  return true;
}

bool is_proof_open(std::string_view s) { return text::starts_with_word(s, "Proof"); }

bool is_accepting_close(std::string_view s) { return s == "Qed." || s == "Defined."; }

bool is_any_close(std::string_view s) {
  return is_accepting_close(s) || s == "Admitted." || s == "Abort.";
}

}  // namespace refiner
