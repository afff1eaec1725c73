#include "epiveri/relation.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "epiveri/diag.hpp"

namespace epiveri {

namespace {

void canonicalize_rows(Relation& r) {
  std::sort(r.rows.begin(), r.rows.end());
  r.rows.erase(std::unique(r.rows.begin(), r.rows.end()), r.rows.end());
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Column positions of names within r.vars, skipping absent names.
std::vector<int> columns_of(const Relation& r,
                            const std::vector<std::string>& names) {
  std::vector<int> cols;
  for (const auto& n : names) {
    auto it = std::lower_bound(r.vars.begin(), r.vars.end(), n);
    if (it != r.vars.end() && *it == n) {
      cols.push_back(static_cast<int>(it - r.vars.begin()));
    }
  }
  return cols;
}

std::vector<uint32_t> project(const std::vector<uint32_t>& row,
                              const std::vector<int>& cols) {
  std::vector<uint32_t> out(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) out[i] = row[cols[i]];
  return out;
}

struct RowHash {
  size_t operator()(const std::vector<uint32_t>& row) const {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (uint32_t x : row) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }
};

}  // namespace

Relation identity(const std::vector<std::string>& x, const Frames& frames) {
  Relation r;
  r.vars = sorted_unique(x);
  for (const auto& v : r.vars) {
    auto it = frames.find(v);
    if (it == frames.end() || it->second <= 0) {
      throw Error(ErrorKind::UnknownVariable,
                  "no frame for variable '" + v + "'");
    }
    r.frame[v] = it->second;
  }
  r.rows.push_back({});
  for (const auto& v : r.vars) {
    std::vector<std::vector<uint32_t>> next;
    next.reserve(r.rows.size() * static_cast<size_t>(r.frame[v]));
    for (const auto& row : r.rows) {
      for (int val = 0; val < r.frame[v]; ++val) {
        auto copy = row;
        copy.push_back(static_cast<uint32_t>(val));
        next.push_back(std::move(copy));
      }
    }
    r.rows = std::move(next);
  }
  canonicalize_rows(r);
  return r;
}

Relation combine(const Relation& s, const Relation& t) {
  Relation out;
  out.vars = s.vars;
  out.vars.insert(out.vars.end(), t.vars.begin(), t.vars.end());
  out.vars = sorted_unique(out.vars);
  out.frame = s.frame;
  for (const auto& [v, m] : t.frame) {
    auto [it, fresh] = out.frame.emplace(v, m);
    if (!fresh && it->second != m) {
      throw Error(ErrorKind::FrameMismatch,
                  "variable '" + v + "' has frames " +
                      std::to_string(it->second) + " and " +
                      std::to_string(m));
    }
  }
  std::vector<std::string> shared;
  std::set_intersection(s.vars.begin(), s.vars.end(), t.vars.begin(),
                        t.vars.end(), std::back_inserter(shared));
  auto s_shared = columns_of(s, shared);
  auto t_shared = columns_of(t, shared);
  std::unordered_map<std::vector<uint32_t>, std::vector<size_t>, RowHash>
      by_shared;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    by_shared[project(t.rows[i], t_shared)].push_back(i);
  }
  // Where each output column comes from: s column, or t column otherwise.
  std::vector<std::pair<bool, int>> source;
  for (const auto& v : out.vars) {
    auto it = std::lower_bound(s.vars.begin(), s.vars.end(), v);
    if (it != s.vars.end() && *it == v) {
      source.emplace_back(true, static_cast<int>(it - s.vars.begin()));
    } else {
      auto jt = std::lower_bound(t.vars.begin(), t.vars.end(), v);
      source.emplace_back(false, static_cast<int>(jt - t.vars.begin()));
    }
  }
  for (const auto& srow : s.rows) {
    auto it = by_shared.find(project(srow, s_shared));
    if (it == by_shared.end()) continue;
    for (size_t ti : it->second) {
      std::vector<uint32_t> row(out.vars.size());
      for (size_t c = 0; c < source.size(); ++c) {
        row[c] = source[c].first ? srow[source[c].second]
                                 : t.rows[ti][source[c].second];
      }
      out.rows.push_back(std::move(row));
    }
  }
  canonicalize_rows(out);
  return out;
}

Relation combine_all(const std::vector<Relation>& s) {
  Relation out = identity({}, {});
  for (const auto& r : s) out = combine(out, r);
  return out;
}

Relation marginalize(const Relation& s, const std::vector<std::string>& x) {
  Relation out;
  auto keep = sorted_unique(x);
  auto cols = columns_of(s, keep);
  for (int c : cols) {
    out.vars.push_back(s.vars[c]);
    out.frame[s.vars[c]] = s.frame.at(s.vars[c]);
  }
  out.rows.reserve(s.rows.size());
  for (const auto& row : s.rows) out.rows.push_back(project(row, cols));
  canonicalize_rows(out);
  return out;
}

Relation eliminate(const Relation& s, const std::string& x) {
  std::vector<std::string> keep;
  for (const auto& v : s.vars) {
    if (v != x) keep.push_back(v);
  }
  return marginalize(s, keep);
}

std::vector<Relation> fuse(std::vector<Relation> s, const std::string& x) {
  std::vector<Relation> rest;
  std::vector<Relation> with;
  for (auto& r : s) {
    bool has = std::binary_search(r.vars.begin(), r.vars.end(), x);
    (has ? with : rest).push_back(std::move(r));
  }
  if (!with.empty()) {
    rest.push_back(eliminate(combine_all(with), x));
  }
  return rest;
}

Relation fusion_marginal(std::vector<Relation> s,
                         const std::vector<std::string>& x,
                         const std::vector<std::string>& order) {
  std::vector<std::string> dom;
  for (const auto& r : s) {
    dom.insert(dom.end(), r.vars.begin(), r.vars.end());
  }
  dom = sorted_unique(dom);
  std::vector<std::string> expect;
  auto keep = sorted_unique(x);
  std::set_difference(dom.begin(), dom.end(), keep.begin(), keep.end(),
                      std::back_inserter(expect));
  if (sorted_unique(order) != expect || order.size() != expect.size()) {
    throw Error(ErrorKind::BadOrder,
                "elimination order is not a permutation of the variables "
                "outside the target set");
  }
  for (const auto& v : order) s = fuse(std::move(s), v);
  return combine_all(s);
}

std::vector<std::string> elimination_order(
    const std::vector<std::vector<std::string>>& domains,
    const std::vector<std::string>& x) {
  std::vector<std::string> all;
  for (const auto& d : domains) all.insert(all.end(), d.begin(), d.end());
  all = sorted_unique(all);
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& v : all) adj[v];
  for (const auto& d : domains) {
    for (const auto& a : d) {
      for (const auto& b : d) {
        if (a != b) adj[a].insert(b);
      }
    }
  }
  std::set<std::string> keep(x.begin(), x.end());
  std::set<std::string> pending;
  for (const auto& v : all) {
    if (!keep.count(v)) pending.insert(v);
  }
  std::vector<std::string> order;
  while (!pending.empty()) {
    const std::string* best = nullptr;
    size_t best_deg = 0;
    for (const auto& v : pending) {
      size_t deg = adj[v].size();
      if (!best || deg < best_deg) {
        best = &v;
        best_deg = deg;
      }
    }
    std::string v = *best;
    const auto& nbrs = adj[v];
    for (const auto& a : nbrs) {
      for (const auto& b : nbrs) {
        if (a != b) adj[a].insert(b);
      }
    }
    for (const auto& n : nbrs) adj[n].erase(v);
    adj.erase(v);
    pending.erase(v);
    order.push_back(std::move(v));
  }
  return order;
}

bool check_ci(const Relation& s, const std::vector<std::string>& x,
              const std::vector<std::string>& y,
              const std::vector<std::string>& z) {
  auto xz = sorted_unique([&] {
    auto v = x;
    v.insert(v.end(), z.begin(), z.end());
    return v;
  }());
  auto yz = sorted_unique([&] {
    auto v = y;
    v.insert(v.end(), z.begin(), z.end());
    return v;
  }());
  auto zc = columns_of(s, sorted_unique(z));
  auto xzc = columns_of(s, xz);
  auto yzc = columns_of(s, yz);
  struct Group {
    std::set<std::vector<uint32_t>> xs, ys;
    std::set<std::pair<std::vector<uint32_t>, std::vector<uint32_t>>> pairs;
  };
  std::unordered_map<std::vector<uint32_t>, Group, RowHash> groups;
  for (const auto& row : s.rows) {
    auto& g = groups[project(row, zc)];
    auto xp = project(row, xzc);
    auto yp = project(row, yzc);
    g.xs.insert(xp);
    g.ys.insert(yp);
    g.pairs.emplace(std::move(xp), std::move(yp));
  }
  for (const auto& [key, g] : groups) {
    if (g.pairs.size() != g.xs.size() * g.ys.size()) return false;
  }
  return true;
}

}  // namespace epiveri
