#include "geomgen/statement.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

#include "geomgen/errors.hpp"

namespace geomgen {

namespace {

struct PredicateInfo {
  Predicate pred;
  std::string_view name;
  int arity;
};

constexpr std::array<PredicateInfo, kPredicateCount> kInfo{{
    {Predicate::coll, "coll", 3},
    {Predicate::ncoll, "ncoll", 3},
    {Predicate::para, "para", 4},
    {Predicate::npara, "npara", 4},
    {Predicate::perp, "perp", 4},
    {Predicate::cong, "cong", 4},
    {Predicate::midp, "midp", 3},
    {Predicate::circle, "circle", 4},
    {Predicate::cyclic, "cyclic", 4},
    {Predicate::eqangle, "eqangle", 8},
    {Predicate::eqratio, "eqratio", 8},
    {Predicate::eqangle6, "eqangle6", 8},
    {Predicate::eqratio6, "eqratio6", 8},
    {Predicate::simtri, "simtri", 6},
    {Predicate::simtri2, "simtri2", 6},
    {Predicate::simtriStar, "simtri*", 6},
    {Predicate::contri, "contri", 6},
    {Predicate::contriStar, "contri*", 6},
    {Predicate::contri2, "contri2", 6},
    {Predicate::sameside, "sameside", 6},
}};

constexpr std::array<Predicate, kPredicateCount> kAll = [] {
  std::array<Predicate, kPredicateCount> out{};
  for (std::size_t i = 0; i < kInfo.size(); ++i) out[i] = kInfo[i].pred;
  return out;
}();

using Perm = std::vector<int>;

std::vector<Perm> generators(Predicate p) {
  switch (p) {
    case Predicate::para:
    case Predicate::npara:
    case Predicate::perp:
    case Predicate::cong:
      return {{1, 0, 2, 3}, {0, 1, 3, 2}, {2, 3, 0, 1}};
    case Predicate::coll:
    case Predicate::ncoll:
      return {{1, 0, 2}, {0, 2, 1}};
    case Predicate::cyclic:
      return {{1, 0, 2, 3}, {1, 2, 3, 0}};
    case Predicate::circle:
      return {{0, 2, 1, 3}, {0, 1, 3, 2}};
    case Predicate::midp:
      return {{0, 2, 1}};
    case Predicate::eqangle:
    case Predicate::eqratio:
    case Predicate::eqangle6:
    case Predicate::eqratio6:
      // Four within-line swaps, then the slot symmetries of
      // L1 - L2 - L3 + L4 = 0: side swap, transpose, reversal.
      return {{1, 0, 2, 3, 4, 5, 6, 7}, {0, 1, 3, 2, 4, 5, 6, 7}, {0, 1, 2, 3, 5, 4, 6, 7},
              {0, 1, 2, 3, 4, 5, 7, 6}, {4, 5, 6, 7, 0, 1, 2, 3}, {0, 1, 4, 5, 2, 3, 6, 7},
              {2, 3, 0, 1, 6, 7, 4, 5}};
    case Predicate::sameside:
      return {{0, 2, 1, 3, 4, 5}, {0, 1, 2, 3, 5, 4}, {3, 4, 5, 0, 1, 2}};
    case Predicate::simtri:
    case Predicate::simtri2:
    case Predicate::simtriStar:
    case Predicate::contri:
    case Predicate::contriStar:
    case Predicate::contri2:
      return {{1, 0, 2, 4, 3, 5}, {0, 2, 1, 3, 5, 4}, {3, 4, 5, 0, 1, 2}};
  }
  return {};
}

std::vector<Perm> close_group(Predicate p) {
  const int n = predicate_arity(p);
  Perm id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  std::set<Perm> seen{id};
  std::vector<Perm> frontier{id};
  const auto gens = generators(p);
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const auto& g : frontier) {
      for (const auto& h : gens) {
        Perm c(n);
        for (int i = 0; i < n; ++i) c[i] = g[h[i]];
        if (seen.insert(c).second) next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

const PredicateInfo& info(Predicate p) { return kInfo[static_cast<std::size_t>(p)]; }

}  // namespace

std::string_view predicate_name(Predicate p) { return info(p).name; }

std::optional<Predicate> predicate_from_name(std::string_view name) {
  if (name == "simtriStar") return Predicate::simtriStar;
  if (name == "contriStar") return Predicate::contriStar;
  for (const auto& i : kInfo)
    if (i.name == name) return i.pred;
  return std::nullopt;
}

int predicate_arity(Predicate p) { return info(p).arity; }

std::span<const Predicate> all_predicates() { return kAll; }

bool is_numeric_guard(Predicate p) {
  return p == Predicate::ncoll || p == Predicate::npara || p == Predicate::sameside;
}

bool is_algebraic(Predicate p) {
  switch (p) {
    case Predicate::para:
    case Predicate::perp:
    case Predicate::cong:
    case Predicate::eqangle:
    case Predicate::eqratio:
    case Predicate::eqangle6:
    case Predicate::eqratio6:
      return true;
    default:
      return false;
  }
}

bool is_triangle_relation(Predicate p) {
  switch (p) {
    case Predicate::simtri:
    case Predicate::simtri2:
    case Predicate::simtriStar:
    case Predicate::contri:
    case Predicate::contriStar:
    case Predicate::contri2:
      return true;
    default:
      return false;
  }
}

std::optional<std::string> normalize_point(std::string_view token) {
  if (token.empty()) return std::nullopt;
  std::string out;
  out.reserve(token.size());
  for (char c : token) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (out[0] < 'a' || out[0] > 'z') return std::nullopt;
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(out[i]))) return std::nullopt;
  return out;
}

Statement parse_statement(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  if (!(in >> word)) throw ParseError("empty statement");
  auto pred = predicate_from_name(word);
  if (!pred) throw ParseError("unknown predicate '" + word + "'");
  Statement s{*pred, {}};
  while (in >> word) {
    auto pt = normalize_point(word);
    if (!pt) throw ParseError("invalid point '" + word + "' in " + std::string(text));
    s.args.push_back(std::move(*pt));
  }
  if (static_cast<int>(s.args.size()) != predicate_arity(*pred))
    throw ParseError("arity mismatch for '" + std::string(predicate_name(*pred)) + "': expected " +
                     std::to_string(predicate_arity(*pred)) + ", got " + std::to_string(s.args.size()));
  return s;
}

std::string format_statement(const Statement& s) {
  std::string out(predicate_name(s.pred));
  for (const auto& a : s.args) {
    out.push_back(' ');
    out += a;
  }
  return out;
}

const std::vector<std::vector<int>>& symmetry_group(Predicate p) {
  static const std::array<std::vector<Perm>, kPredicateCount> groups = [] {
    std::array<std::vector<Perm>, kPredicateCount> g;
    for (const auto& i : kInfo) g[static_cast<std::size_t>(i.pred)] = close_group(i.pred);
    return g;
  }();
  return groups[static_cast<std::size_t>(p)];
}

Statement canonicalize(const Statement& s) {
  const auto& group = symmetry_group(s.pred);
  const std::size_t n = s.args.size();
  const std::vector<int>* best = nullptr;
  for (const auto& perm : group) {
    if (!best) {
      best = &perm;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = s.args[perm[i]];
      const auto& b = s.args[(*best)[i]];
      if (a == b) continue;
      if (a < b) best = &perm;
      break;
    }
  }
  Statement out{s.pred, std::vector<std::string>(n)};
  for (std::size_t i = 0; i < n; ++i) out.args[i] = s.args[(*best)[i]];
  return out;
}

std::vector<Statement> symmetry_orbit(const Statement& s) {
  std::set<Statement> seen;
  for (const auto& perm : symmetry_group(s.pred)) {
    Statement t{s.pred, std::vector<std::string>(s.args.size())};
    for (std::size_t i = 0; i < s.args.size(); ++i) t.args[i] = s.args[perm[i]];
    seen.insert(std::move(t));
  }
  return {seen.begin(), seen.end()};
}

std::vector<std::pair<std::string, std::string>> mentioned_pairs(const Statement& s) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](const std::string& a, const std::string& b) {
    if (a == b) return;
    out.emplace_back(std::min(a, b), std::max(a, b));
  };
  const auto& a = s.args;
  switch (s.pred) {
    case Predicate::coll:
    case Predicate::ncoll:
    case Predicate::midp:
      add(a[0], a[1]);
      add(a[0], a[2]);
      add(a[1], a[2]);
      break;
    case Predicate::circle:
      add(a[0], a[1]);
      add(a[0], a[2]);
      add(a[0], a[3]);
      break;
    case Predicate::cyclic:
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) add(a[i], a[j]);
      break;
    case Predicate::sameside:
      break;
    default:
      if (is_triangle_relation(s.pred)) {
        for (int t = 0; t < 6; t += 3) {
          add(a[t], a[t + 1]);
          add(a[t + 1], a[t + 2]);
          add(a[t], a[t + 2]);
        }
      } else {
        for (std::size_t i = 0; i + 1 < a.size(); i += 2) add(a[i], a[i + 1]);
      }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace geomgen
