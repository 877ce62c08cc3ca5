#ifndef ARGTREE_REPORT_HPP
#define ARGTREE_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "argtree/eval.hpp"

namespace argtree {

struct RenderOptions {
  // Categories listed separately; everything else is pooled as "others".
  std::vector<std::string> featured = {"S", "VP", "NP", "PP"};
  std::size_t top_errors = 10;
};

namespace detail {

inline std::string percent(std::int64_t part, std::int64_t whole, int decimals) {
  char buf[32];
  const double v = whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
  std::snprintf(buf, sizeof buf, "%.*f%%", decimals, v);
  return buf;
}

inline std::string pad_right(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }
inline std::string pad_left(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

inline std::string row(const std::string& label, const Cell& c, std::int64_t whole) {
  return pad_right(label, 16) + pad_left(percent(c.cases, whole, 0), 6) + pad_left(percent(c.correct, c.cases, 1), 9) + "\n";
}

inline const char* kGradeRows[3] = {"reliable", "marked", "unreliable"};
inline const char* kCategoryRows[3] = {"decision", "marked", "no decision"};

}  // namespace detail

// Shares and accuracies by reliability grade, then an overall line.
inline std::string render_grade_table(const AccuracyReport& r) {
  std::string out = detail::pad_right("", 16) + detail::pad_left("cases", 6) + detail::pad_left("correct", 9) + "\n";
  if (r.overall.total.cases == 0) return out;
  for (std::size_t g = 0; g < 3; ++g)
    if (r.overall.by_grade[g].cases) out += detail::row(detail::kGradeRows[g], r.overall.by_grade[g], r.overall.total.cases);
  out += detail::row("overall", r.overall.total, r.overall.total.cases);
  return out;
}

// One block per category: its share of all cases and accuracy, then the
// grade breakdown relative to the category.
inline std::string render_category_table(const AccuracyReport& r, const RenderOptions& opt = {}) {
  std::string out = detail::pad_right("", 16) + detail::pad_left("cases", 6) + detail::pad_left("correct", 9) + "\n";
  std::vector<std::pair<std::string, Strata>> blocks;
  Strata others;
  const std::set<std::string> featured(opt.featured.begin(), opt.featured.end());
  for (const auto& q : opt.featured)
    if (auto it = r.by_category.find(q); it != r.by_category.end() && it->second.total.cases) blocks.push_back(*it);
  for (const auto& [q, s] : r.by_category)
    if (!featured.contains(q)) others += s;
  if (others.total.cases) blocks.push_back({"others", others});
  for (const auto& [q, s] : blocks) {
    out += detail::row(q, s.total, r.overall.total.cases);
    for (std::size_t g = 0; g < 3; ++g)
      if (s.by_grade[g].cases) out += detail::row(std::string("  ") + detail::kCategoryRows[g], s.by_grade[g], s.total.cases);
  }
  return out;
}

inline std::string render_error_table(const AccuracyReport& r, std::size_t n = 10) {
  using detail::pad_left;
  using detail::pad_right;
  std::string out;
  const auto errors = top_errors(r, n);
  if (r.kind == ReportKind::Functions) {
    out = pad_right("", 4) + pad_right("phrase", 8) + pad_right("elem", 8) + pad_left("f", 6) + "  " + pad_right("original", 14) + "assigned\n";
    for (std::size_t i = 0; i < errors.size(); ++i) {
      const auto& e = errors[i];
      out += pad_left(std::to_string(i + 1) + ".", 3) + " " + pad_right(e.key.mother, 8) + pad_right(e.key.daughter, 8) +
             pad_left(std::to_string(e.combination), 6) + "  " + pad_right(e.key.gold, 6) + pad_left(std::to_string(e.gold), 6) +
             "  " + pad_right(e.key.assigned.empty() ? "-" : e.key.assigned, 6) + pad_left(std::to_string(e.count), 6) + "\n";
    }
  } else {
    out = pad_right("", 4) + pad_right("phrase", 8) + pad_left("f", 6) + "  " + pad_right("assigned", 8) + pad_left("f", 6) + "\n";
    for (std::size_t i = 0; i < errors.size(); ++i) {
      const auto& e = errors[i];
      out += pad_left(std::to_string(i + 1) + ".", 3) + " " + pad_right(e.key.gold, 8) + pad_left(std::to_string(e.gold), 6) +
             "  " + pad_right(e.key.assigned.empty() ? "-" : e.key.assigned, 8) + pad_left(std::to_string(e.count), 6) + "\n";
    }
  }
  return out;
}

inline std::string render_report(const AccuracyReport& r, const RenderOptions& opt = {}) {
  const bool f = r.kind == ReportKind::Functions;
  std::string out;
  out += f ? "Grammatical functions by reliability\n" : "Phrase categories by reliability\n";
  out += render_grade_table(r);
  out += f ? "\nGrammatical functions by mother category\n" : "\nPhrase categories by gold category\n";
  out += render_category_table(r, opt);
  out += "\nMost frequent errors\n";
  out += render_error_table(r, opt.top_errors);
  return out;
}

// Machine-readable form. Top-level keys: kind, folds, seed, theta1, theta2,
// overall, by_category, errors. A stratum holds cases/correct/accuracy and one
// such cell per grade under "reliable", "marked", "unreliable".
inline nlohmann::ordered_json report_json(const AccuracyReport& r, std::size_t n_errors = 10) {
  using nlohmann::ordered_json;
  auto cell = [](const Cell& c) {
    return ordered_json{{"cases", c.cases}, {"correct", c.correct}, {"accuracy", c.accuracy()}};
  };
  auto strata = [&](const Strata& s) {
    ordered_json j = cell(s.total);
    for (std::size_t g = 0; g < 3; ++g) j[to_string(static_cast<Reliability>(g))] = cell(s.by_grade[g]);
    return j;
  };
  ordered_json j;
  j["kind"] = r.kind == ReportKind::Functions ? "functions" : "phrases";
  j["folds"] = r.folds;
  j["seed"] = r.seed;
  j["theta1"] = r.thresholds.unreliable_below;
  j["theta2"] = r.thresholds.reliable_from;
  j["overall"] = strata(r.overall);
  ordered_json cats = ordered_json::object();
  for (const auto& [q, s] : r.by_category) cats[q] = strata(s);
  j["by_category"] = std::move(cats);
  ordered_json errs = ordered_json::array();
  for (const auto& e : top_errors(r, n_errors))
    errs.push_back({{"mother", e.key.mother},
                    {"daughter", e.key.daughter},
                    {"combination", e.combination},
                    {"gold", e.key.gold},
                    {"gold_count", e.gold},
                    {"assigned", e.key.assigned},
                    {"count", e.count}});
  j["errors"] = std::move(errs);
  return j;
}

}  // namespace argtree

#endif  // ARGTREE_REPORT_HPP
