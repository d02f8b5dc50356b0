#include "geomgen/algebra.hpp"

#include <algorithm>
#include <deque>

namespace geomgen {

namespace {

std::vector<FactId> merge_sources(const std::vector<FactId>& a, const std::vector<FactId>& b) {
  std::vector<FactId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_integer(const Rational& r) { return r.denominator() == 1; }

bool is_unit(const Rational& r) { return r.denominator() == 1 && (r.numerator() == 1 || r.numerator() == -1); }

// Whole multiples of the half-turn vanish.
bool congruent_zero(const Rational& r, LinearSystem::Modulus m) {
  return m == LinearSystem::Modulus::half_turn ? is_integer(r) : r.numerator() == 0;
}

}  // namespace

void LinearEquation::add(int var, Rational c) {
  if (c.numerator() == 0) return;
  auto [it, inserted] = coeffs.emplace(var, c);
  if (!inserted) {
    it->second += c;
    if (it->second.numerator() == 0) coeffs.erase(it);
  }
}

void LinearSystem::axpy(Row& target, const Row& row, Rational factor) {
  for (const auto& [v, c] : row.eq.coeffs) target.eq.add(v, -factor * c);
  target.eq.constant -= factor * row.eq.constant;
  target.sources = merge_sources(target.sources, row.sources);
  target.exact = target.exact && row.exact && is_integer(factor);
}

LinearSystem::Row LinearSystem::reduce(Row r) const {
  std::vector<int> pivots;
  for (const auto& [v, _] : r.eq.coeffs)
    if (rows_.count(v)) pivots.push_back(v);
  for (int v : pivots) {
    auto it = r.eq.coeffs.find(v);
    if (it == r.eq.coeffs.end()) continue;
    Rational factor = it->second;
    axpy(r, rows_.at(v), factor);
  }
  return r;
}

bool LinearSystem::insert(const LinearEquation& eq, FactId source) {
  Row r = reduce(Row{eq, {source}, true});
  if (r.eq.is_zero()) return false;

  int pivot = r.eq.coeffs.begin()->first;
  for (const auto& [v, c] : r.eq.coeffs)
    if (is_unit(c)) {
      pivot = v;
      break;
    }
  Rational scale = r.eq.coeffs.at(pivot);
  if (!is_unit(scale)) r.exact = false;
  for (auto& [_, c] : r.eq.coeffs) c /= scale;
  r.eq.constant /= scale;

  for (auto& [p, row] : rows_) {
    auto it = row.eq.coeffs.find(pivot);
    if (it == row.eq.coeffs.end()) continue;
    Rational factor = it->second;
    axpy(row, r, factor);
  }
  rows_.emplace(pivot, std::move(r));
  return true;
}

std::optional<Certificate> LinearSystem::query(const LinearEquation& eq) const {
  Row r = reduce(Row{eq, {}, true});
  if (!r.eq.is_zero()) return std::nullopt;
  if (r.exact && !congruent_zero(r.eq.constant, modulus_)) return std::nullopt;
  if (modulus_ == Modulus::none && r.eq.constant.numerator() != 0) return std::nullopt;
  return Certificate{r.sources, r.exact};
}

int PairIndex::var(const std::string& a, const std::string& b) {
  auto key = a < b ? std::pair{a, b} : std::pair{b, a};
  auto [it, _] = ids_.emplace(key, static_cast<int>(ids_.size()));
  return it->second;
}

std::optional<int> PairIndex::find(const std::string& a, const std::string& b) const {
  auto key = a < b ? std::pair{a, b} : std::pair{b, a};
  auto it = ids_.find(key);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------- angles

bool AngleSystem::accepts(Predicate p) {
  switch (p) {
    case Predicate::para:
    case Predicate::perp:
    case Predicate::eqangle:
    case Predicate::eqangle6:
    case Predicate::coll:
    case Predicate::midp:
      return true;
    default:
      return false;
  }
}

std::vector<LinearEquation> AngleSystem::equations(const Statement& s, bool create) {
  const auto& a = s.args;
  for (std::size_t i = 0; i + 1 < a.size(); i += 2)
    if ((s.pred != Predicate::coll && s.pred != Predicate::midp) && a[i] == a[i + 1]) return {};
  auto d = [&](int i, int j) { return vars_.var(a[i], a[j]); };
  std::vector<LinearEquation> out;
  (void)create;
  switch (s.pred) {
    case Predicate::para:
    case Predicate::perp: {
      LinearEquation e;
      e.add(d(0, 1), 1);
      e.add(d(2, 3), -1);
      e.constant = s.pred == Predicate::perp ? Rational(1, 2) : Rational(0);
      out.push_back(e);
      break;
    }
    case Predicate::eqangle:
    case Predicate::eqangle6: {
      LinearEquation e;
      e.add(d(0, 1), 1);
      e.add(d(2, 3), -1);
      e.add(d(4, 5), -1);
      e.add(d(6, 7), 1);
      out.push_back(e);
      break;
    }
    case Predicate::coll:
    case Predicate::midp: {
      if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) return {};
      LinearEquation e1, e2;
      e1.add(d(0, 1), 1);
      e1.add(d(0, 2), -1);
      e2.add(d(0, 1), 1);
      e2.add(d(1, 2), -1);
      out.push_back(e1);
      out.push_back(e2);
      break;
    }
    default:
      break;
  }
  return out;
}

bool AngleSystem::add(const Statement& s, FactId source) {
  if (!accepts(s.pred)) return false;
  bool any = false;
  for (const auto& e : equations(s, true)) {
    if (e.is_zero()) continue;
    sys_.insert(e, source);
    any = true;
  }
  return any;
}

std::optional<LinearEquation> AngleSystem::query_equation(const Statement& s) const {
  const auto& a = s.args;
  LinearEquation e;
  // Unknown pairs get fresh ids past every stored variable; they can only
  // cancel against themselves.
  std::map<std::pair<std::string, std::string>, int> fresh;
  auto d = [&](int i, int j) -> int {
    if (auto v = vars_.find(a[i], a[j])) return *v;
    auto key = a[i] < a[j] ? std::pair{a[i], a[j]} : std::pair{a[j], a[i]};
    auto [it, _] = fresh.emplace(key, -1 - static_cast<int>(fresh.size()));
    return it->second;
  };
  for (std::size_t i = 0; i + 1 < a.size(); i += 2)
    if (a[i] == a[i + 1]) return std::nullopt;
  switch (s.pred) {
    case Predicate::para:
    case Predicate::perp:
      e.add(d(0, 1), 1);
      e.add(d(2, 3), -1);
      e.constant = s.pred == Predicate::perp ? Rational(1, 2) : Rational(0);
      return e;
    case Predicate::eqangle:
    case Predicate::eqangle6:
      e.add(d(0, 1), 1);
      e.add(d(2, 3), -1);
      e.add(d(4, 5), -1);
      e.add(d(6, 7), 1);
      return e;
    default:
      return std::nullopt;
  }
}

std::optional<Certificate> AngleSystem::query(const Statement& s) const {
  auto e = query_equation(s);
  if (!e) return std::nullopt;
  if (e->is_zero()) {
    if (s.pred == Predicate::perp) return std::nullopt;
    return Certificate{{}, true};
  }
  return sys_.query(*e);
}

// ---------------------------------------------------------------- ratios

bool RatioSystem::accepts(Predicate p) {
  switch (p) {
    case Predicate::cong:
    case Predicate::eqratio:
    case Predicate::eqratio6:
    case Predicate::midp:
    case Predicate::circle:
      return true;
    default:
      return false;
  }
}

std::vector<LinearEquation> RatioSystem::equations(const Statement& s, bool) {
  const auto& a = s.args;
  auto l = [&](int i, int j) { return vars_.var(a[i], a[j]); };
  std::vector<LinearEquation> out;
  switch (s.pred) {
    case Predicate::cong: {
      if (a[0] == a[1] || a[2] == a[3]) return {};
      LinearEquation e;
      e.add(l(0, 1), 1);
      e.add(l(2, 3), -1);
      out.push_back(e);
      break;
    }
    case Predicate::eqratio:
    case Predicate::eqratio6: {
      for (int i = 0; i < 8; i += 2)
        if (a[i] == a[i + 1]) return {};
      LinearEquation e;
      e.add(l(0, 1), 1);
      e.add(l(2, 3), -1);
      e.add(l(4, 5), -1);
      e.add(l(6, 7), 1);
      out.push_back(e);
      break;
    }
    case Predicate::midp: {
      if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) return {};
      LinearEquation e1, e2;
      e1.add(l(0, 1), 1);
      e1.add(l(0, 2), -1);
      e2.add(l(1, 2), 1);
      e2.add(l(0, 1), -1);
      e2.constant = 1;  // log 2
      out.push_back(e1);
      out.push_back(e2);
      break;
    }
    case Predicate::circle: {
      for (int i = 1; i < 4; ++i)
        if (a[0] == a[i]) return {};
      LinearEquation e1, e2;
      e1.add(l(0, 1), 1);
      e1.add(l(0, 2), -1);
      e2.add(l(0, 1), 1);
      e2.add(l(0, 3), -1);
      out.push_back(e1);
      out.push_back(e2);
      break;
    }
    default:
      break;
  }
  return out;
}

bool RatioSystem::add(const Statement& s, FactId source) {
  if (!accepts(s.pred)) return false;
  bool any = false;
  for (const auto& e : equations(s, true)) {
    if (e.is_zero()) continue;
    sys_.insert(e, source);
    any = true;
  }
  return any;
}

std::optional<LinearEquation> RatioSystem::query_equation(const Statement& s) const {
  const auto& a = s.args;
  std::map<std::pair<std::string, std::string>, int> fresh;
  auto l = [&](int i, int j) -> int {
    if (auto v = vars_.find(a[i], a[j])) return *v;
    auto key = a[i] < a[j] ? std::pair{a[i], a[j]} : std::pair{a[j], a[i]};
    auto [it, _] = fresh.emplace(key, -1 - static_cast<int>(fresh.size()));
    return it->second;
  };
  for (std::size_t i = 0; i + 1 < a.size(); i += 2)
    if (a[i] == a[i + 1]) return std::nullopt;
  LinearEquation e;
  switch (s.pred) {
    case Predicate::cong:
      e.add(l(0, 1), 1);
      e.add(l(2, 3), -1);
      return e;
    case Predicate::eqratio:
    case Predicate::eqratio6:
      e.add(l(0, 1), 1);
      e.add(l(2, 3), -1);
      e.add(l(4, 5), -1);
      e.add(l(6, 7), 1);
      return e;
    default:
      return std::nullopt;
  }
}

std::optional<Certificate> RatioSystem::query(const Statement& s) const {
  auto e = query_equation(s);
  if (!e) return std::nullopt;
  if (e->is_zero()) return Certificate{{}, true};
  return sys_.query(*e);
}

// ---------------------------------------------------------------- congruence

bool CongClosure::accepts(Predicate p) {
  return p == Predicate::cong || p == Predicate::circle || p == Predicate::midp;
}

int CongClosure::seg(const std::string& a, const std::string& b) {
  int id = segs_.var(a, b);
  while (static_cast<int>(parent_.size()) <= id) {
    parent_.push_back(static_cast<int>(parent_.size()));
    adj_.emplace_back();
  }
  return id;
}

std::optional<int> CongClosure::find_seg(const std::string& a, const std::string& b) const { return segs_.find(a, b); }

int CongClosure::root(int x) const {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void CongClosure::unite(int x, int y, FactId source) {
  int rx = root(x), ry = root(y);
  if (rx == ry) return;
  parent_[rx] = ry;
  adj_[x].push_back({y, source});
  adj_[y].push_back({x, source});
}

bool CongClosure::add(const Statement& s, FactId source) {
  const auto& a = s.args;
  switch (s.pred) {
    case Predicate::cong:
      if (a[0] == a[1] || a[2] == a[3]) return false;
      unite(seg(a[0], a[1]), seg(a[2], a[3]), source);
      return true;
    case Predicate::circle:
      for (int i = 1; i < 4; ++i)
        if (a[0] == a[i]) return false;
      unite(seg(a[0], a[1]), seg(a[0], a[2]), source);
      unite(seg(a[0], a[1]), seg(a[0], a[3]), source);
      return true;
    case Predicate::midp:
      if (a[0] == a[1] || a[0] == a[2]) return false;
      unite(seg(a[0], a[1]), seg(a[0], a[2]), source);
      return true;
    default:
      return false;
  }
}

bool CongClosure::same(const std::string& a, const std::string& b, const std::string& c, const std::string& d) const {
  auto x = find_seg(a, b), y = find_seg(c, d);
  if (!x || !y) return a == b ? c == d : (std::minmax(a, b) == std::minmax(c, d));
  return root(*x) == root(*y);
}

std::optional<Certificate> CongClosure::query(const Statement& s) const {
  if (s.pred != Predicate::cong) return std::nullopt;
  const auto& a = s.args;
  if (a[0] == a[1] || a[2] == a[3]) return std::nullopt;
  if (std::minmax(a[0], a[1]) == std::minmax(a[2], a[3])) return Certificate{{}, true};
  auto x = find_seg(a[0], a[1]), y = find_seg(a[2], a[3]);
  if (!x || !y || root(*x) != root(*y)) return std::nullopt;
  // The union edges form a spanning forest: the tree path is unique.
  std::vector<int> prev(adj_.size(), -2);
  std::vector<FactId> via(adj_.size(), -1);
  std::deque<int> queue{*x};
  prev[*x] = -1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == *y) break;
    for (const auto& e : adj_[u])
      if (prev[e.to] == -2) {
        prev[e.to] = u;
        via[e.to] = e.source;
        queue.push_back(e.to);
      }
  }
  std::vector<FactId> sources;
  for (int u = *y; prev[u] != -1; u = prev[u]) sources.push_back(via[u]);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  return Certificate{sources, true};
}

}  // namespace geomgen

namespace geomgen {

void AlgebraState::add(const Statement& s, FactId source) {
  angle.add(s, source);
  ratio.add(s, source);
  cong.add(s, source);
}

namespace {

std::optional<AlgebraicProof> derive_cong(const AlgebraState& st, const std::string& a, const std::string& b,
                                          const std::string& c, const std::string& d) {
  Statement s{Predicate::cong, {a, b, c, d}};
  if (auto cert = st.cong.query(s)) return AlgebraicProof{*cert, "cong"};
  if (auto cert = st.ratio.query(s)) return AlgebraicProof{*cert, "ratio"};
  return std::nullopt;
}

AlgebraicProof combine(const AlgebraicProof& x, const AlgebraicProof& y, std::string subsystem) {
  AlgebraicProof out;
  out.subsystem = std::move(subsystem);
  std::set_union(x.cert.sources.begin(), x.cert.sources.end(), y.cert.sources.begin(), y.cert.sources.end(),
                 std::back_inserter(out.cert.sources));
  out.cert.exact = x.cert.exact && y.cert.exact;
  return out;
}

}  // namespace

std::optional<AlgebraicProof> AlgebraState::derive(const Statement& s) const {
  const auto& a = s.args;
  switch (s.pred) {
    case Predicate::para:
    case Predicate::perp:
    case Predicate::eqangle:
    case Predicate::eqangle6:
      if (auto cert = angle.query(s)) return AlgebraicProof{*cert, "angle"};
      return std::nullopt;
    case Predicate::cong:
      return derive_cong(*this, a[0], a[1], a[2], a[3]);
    case Predicate::eqratio:
    case Predicate::eqratio6:
      if (auto cert = ratio.query(s)) return AlgebraicProof{*cert, "ratio"};
      return std::nullopt;
    case Predicate::circle: {
      auto x = derive_cong(*this, a[0], a[1], a[0], a[2]);
      if (!x) return std::nullopt;
      auto y = derive_cong(*this, a[0], a[1], a[0], a[3]);
      if (!y) return std::nullopt;
      return combine(*x, *y, "cong");
    }
    case Predicate::midp: {
      if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) return std::nullopt;
      auto line = angle.query(Statement{Predicate::para, {a[0], a[1], a[0], a[2]}});
      if (!line) return std::nullopt;
      auto eq = derive_cong(*this, a[0], a[1], a[0], a[2]);
      if (!eq) return std::nullopt;
      return combine(AlgebraicProof{*line, "angle"}, *eq, "cong");
    }
    default:
      return std::nullopt;
  }
}

}  // namespace geomgen
