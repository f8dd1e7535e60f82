#pragma once

// Scoring written from the textbook formula, sharing nothing with the index.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace refiner::testing {

struct OracleDoc {
  std::string name;
  std::vector<std::string> tokens;
};

inline std::vector<std::string> oracle_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '_' || c == '\'';
    if (keep) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::vector<std::string> oracle_top_k(const std::vector<OracleDoc>& docs,
                                             const std::string& self, const std::string& query,
                                             std::size_t k) {
  const double k1 = 1.2, b = 0.75;
  double avgdl = 0;
  for (const auto& d : docs) avgdl += static_cast<double>(d.tokens.size());
  avgdl /= static_cast<double>(docs.size());
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& d : docs) {
    if (d.name == self) continue;
    double s = 0;
    for (const auto& q : oracle_tokens(query)) {
      double f = static_cast<double>(std::count(d.tokens.begin(), d.tokens.end(), q));
      if (f == 0) continue;
      double df = 0;
      for (const auto& e : docs) df += std::count(e.tokens.begin(), e.tokens.end(), q) > 0;
      double n = static_cast<double>(docs.size());
      double idf = std::log(1 + (n - df + 0.5) / (df + 0.5));
      s += idf * f * (k1 + 1) /
           (f + k1 * (1 - b + b * static_cast<double>(d.tokens.size()) / avgdl));
    }
    scored.emplace_back(s, d.name);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace refiner::testing
