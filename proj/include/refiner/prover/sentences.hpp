#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace refiner {

// One vernacular sentence. `text` has comments removed and whitespace
// normalized; [begin, end) is the raw span in the source, comments included.
struct Sentence {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Sentence&) const = default;
};

// Splits a script into sentences. A sentence ends at '.' followed by
// whitespace or end of input, outside comments and string literals. Bullets
// (runs of '-', '+', '*') and braces at the start of a sentence are sentences
// of their own. Trailing text without a terminator becomes a final sentence.
std::vector<Sentence> split_sentences(std::string_view script);

// Sentence texts only.
std::vector<std::string> sentence_texts(std::string_view script);

// Normalized form: sentence texts joined by one space.
std::string normalize_script(std::string_view script);

std::string join_sentences(const std::vector<std::string>& sentences);

// Removes (* ... *) comments, honoring nesting and strings.
std::string strip_comments(std::string_view script);

bool is_bullet(std::string_view sentence);
bool is_proof_open(std::string_view sentence);
// Qed. / Defined.
bool is_accepting_close(std::string_view sentence);
// Admitted. / Abort. / Qed. / Defined.
bool is_any_close(std::string_view sentence);

}  // namespace refiner
