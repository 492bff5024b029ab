#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace semsearch::oracle {

namespace {

std::string lower_collapsed(const std::string& s) {
  std::string out;
  bool space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

const Synset& synset(const OntologyStore& store, const std::string& id) {
  for (const auto& s : store.synsets())
    if (s.id == id) return s;
  throw std::out_of_range("oracle: no synset " + id);
}

const ClassNode& class_node(const OntologyStore& store, const std::string& id) {
  for (const auto& c : store.classes())
    if (c.id == id) return c;
  throw std::out_of_range("oracle: no class " + id);
}

}  // namespace

std::set<std::string> class_ancestors(const OntologyStore& store, const std::string& class_id) {
  std::set<std::string> seen;
  std::vector<std::string> stack{class_id};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    for (const auto& p : class_node(store, id).parent_ids)
      if (seen.insert(p).second) stack.push_back(p);
  }
  return seen;
}

std::map<std::string, int> hypernym_ancestors(const OntologyStore& store, const std::string& synset_id) {
  std::map<std::string, int> dist{{synset_id, 0}};
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [id, d] : std::map<std::string, int>(dist))
      for (const auto& h : synset(store, id).hypernym_ids) {
        auto it = dist.find(h);
        if (it == dist.end() || it->second > d + 1) {
          dist[h] = d + 1;
          changed = true;
        }
      }
  }
  return dist;
}

int longest_root_path(const OntologyStore& store, const std::string& synset_id) {
  int best = 0;
  for (const auto& h : synset(store, synset_id).hypernym_ids) best = std::max(best, 1 + longest_root_path(store, h));
  return best;
}

std::string msc(const OntologyStore& store, std::span<const std::string> senses) {
  std::set<std::string> common;
  bool first = true;
  for (const auto& s : senses) {
    std::set<std::string> anc;
    for (const auto& [id, d] : hypernym_ancestors(store, s)) anc.insert(id);
    if (first) {
      common = anc;
      first = false;
      continue;
    }
    std::set<std::string> keep;
    std::set_intersection(common.begin(), common.end(), anc.begin(), anc.end(), std::inserter(keep, keep.end()));
    common = keep;
  }
  std::string best;
  int best_depth = -1;
  for (const auto& c : common) {
    const int d = longest_root_path(store, c);
    if (d > best_depth) {  // std::set iterates ids ascending, so the first max wins ties
      best = c;
      best_depth = d;
    }
  }
  return best;
}

std::set<std::string> ne_patterns(const OntologyStore& store, const EntityRecord& entity) {
  const std::string n = lower_collapsed(entity.main_name);
  const std::string& c = entity.class_id;
  std::vector<std::string> aliases;
  for (const auto& a : entity.aliases) aliases.push_back(lower_collapsed(a));
  const auto supers = class_ancestors(store, c);
  auto t = [](const std::string& name, const std::string& cls, const std::string& id) {
    return "ne:" + (name.empty() ? "*" : name) + "/" + (cls.empty() ? "*" : cls) + "/" + (id.empty() ? "*" : id);
  };

  std::set<std::string> out;
  out.insert(t(n, "", ""));                                      // (n/*/*)
  out.insert(t("", c, ""));                                      // (*/c/*)
  out.insert(t(n, c, ""));                                       // (n/c/*)
  for (const auto& a : aliases) out.insert(t(a, "", ""));        // (alias/*/*)
  for (const auto& s : supers) out.insert(t("", s, ""));         // (*/super/*)
  for (const auto& s : supers) out.insert(t(n, s, ""));          // (n/super/*)
  for (const auto& a : aliases) out.insert(t(a, c, ""));         // (alias/c/*)
  for (const auto& a : aliases)
    for (const auto& s : supers) out.insert(t(a, s, ""));        // (alias/super/*)
  out.insert(t("", "", entity.id));                              // (*/*/id)
  return out;
}

std::set<std::string> ww_resolved(const OntologyStore& store, const std::string& sense) {
  const auto& s = synset(store, sense);
  std::set<std::string> out{"ws:" + s.id};
  for (const auto& f : s.forms) out.insert("wf:" + f);
  for (const auto& h : s.hypernym_ids) {
    out.insert("ws:" + h);
    for (const auto& fh : synset(store, h).forms) out.insert("wf:" + fh);
    for (const auto& f : s.forms) out.insert("wp:" + f + "/" + h);
  }
  return out;
}

std::set<std::string> ww_tied(const OntologyStore& store, const std::string& form, const std::string& msc_id) {
  const auto& m = synset(store, msc_id);
  std::set<std::string> out{"wf:" + form, "wp:" + form + "/" + m.id, "ws:" + m.id};
  for (const auto& f : m.forms) out.insert("wf:" + f);
  for (const auto& h : m.hypernym_ids) {
    out.insert("ws:" + h);
    for (const auto& fh : synset(store, h).forms) out.insert("wf:" + fh);
    out.insert("wp:" + form + "/" + h);
  }
  return out;
}

std::size_t DenseGraph::edges() const {
  std::size_t e = 0;
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j = i + 1; j < adj.size(); ++j) e += adj[i][j];
  return e;
}

DenseGraph dense_sense_graph(const OntologyStore& store) {
  DenseGraph g;
  for (const auto& s : store.synsets()) g.ids.push_back(s.id);
  std::sort(g.ids.begin(), g.ids.end());
  const std::size_t n = g.ids.size();
  g.adj.assign(n, std::vector<int>(n, 0));
  auto pos = [&](const std::string& id) {
    return static_cast<std::size_t>(std::lower_bound(g.ids.begin(), g.ids.end(), id) - g.ids.begin());
  };
  auto link = [&](const std::string& a, const std::string& b) {
    const auto i = pos(a), j = pos(b);
    if (i == j) return;
    g.adj[i][j] = g.adj[j][i] = 1;
  };
  for (const auto& s : store.synsets()) {
    for (const auto& h : s.hypernym_ids) link(s.id, h);
    for (const auto& [kind, target] : s.other_edges) link(s.id, target);
  }
  return g;
}

std::vector<double> dense_ppr(const DenseGraph& g, const std::vector<double>& teleport, double damping,
                              int max_iterations, double epsilon) {
  const std::size_t n = g.ids.size();
  std::vector<int> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) degree[i] += g.adj[i][j];
  std::vector<double> v = teleport;
  for (int it = 0; it < max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (degree[j] == 0) dangling += v[j];
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double walk = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (g.adj[i][j]) walk += v[j] / degree[j];
      next[i] = (1.0 - damping) * teleport[i] + damping * (walk + dangling * teleport[i]);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - v[i]);
    v = std::move(next);
    if (change < epsilon) break;
  }
  return v;
}

double average_precision(const std::vector<std::string>& ranking, const std::set<std::string>& relevant) {
  double sum = 0.0;
  for (std::size_t k = 1; k <= ranking.size(); ++k) {
    if (!relevant.count(ranking[k - 1])) continue;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += relevant.count(ranking[i]);
    sum += static_cast<double>(hits) / static_cast<double>(k);
  }
  return sum / static_cast<double>(relevant.size());
}

double exact_randomization(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  double observed = 0.0;
  for (double x : d) observed += x;
  observed = std::abs(observed / static_cast<double>(n));
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1) ? -d[i] : d[i];
    if (std::abs(s / static_cast<double>(n)) >= observed * (1.0 - 1e-12)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(total);
}

Bag to_bag(const TermBag& terms) {
  Bag out;
  for (const auto& [t, w] : terms) out[t.serialize()] += w;
  return out;
}

std::map<std::string, double> dense_scores(const std::vector<AnnotatedDocument>& docs, const Bag& query) {
  const double n = static_cast<double>(docs.size());
  std::map<std::string, double> df;
  std::vector<Bag> bags;
  for (const auto& d : docs) {
    bags.push_back(to_bag(d.terms));
    for (const auto& [t, tf] : bags.back()) df[t] += 1.0;
  }
  auto weight = [&](const std::string& t, double tf) {
    const double idf = std::max(std::log(n / df.at(t)), 0.01);
    return (tf >= 1.0 ? 1.0 + std::log(tf) : tf) * idf;
  };
  Bag q;
  for (const auto& [t, tf] : query)
    if (df.count(t) && tf > 0) q[t] = weight(t, tf);
  double qn = 0.0;
  for (const auto& [t, w] : q) qn += w * w;
  qn = std::sqrt(qn);

  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double dot = 0.0, dn = 0.0;
    for (const auto& [t, tf] : bags[i]) {
      const double w = weight(t, tf);
      dn += w * w;
      if (auto it = q.find(t); it != q.end()) dot += w * it->second;
    }
    scores[docs[i].doc_id] = (qn == 0.0 || dn == 0.0) ? 0.0 : dot / (qn * std::sqrt(dn));
  }
  return scores;
}

std::vector<std::string> rank(const std::map<std::string, double>& scores) {
  std::vector<std::pair<std::string, double>> v;
  for (const auto& [id, s] : scores)
    if (s > 0.0) v.emplace_back(id, s);
  std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  std::vector<std::string> out;
  for (const auto& [id, s] : v) out.push_back(id);
  return out;
}

}  // namespace semsearch::oracle
