#pragma once

// Brute-force reference implementations and random instance generators shared
// by the unit tests and the acceptance binary. Nothing here calls the library
// routine it is meant to check.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "claimtree/corpus.hpp"
#include "claimtree/embedding.hpp"
#include "claimtree/ranking.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(const Vec& a, const Vec& b) {
  return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
}

inline double harmonic_mean_by_rank(const Vec& xs) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 1; r <= xs.size(); ++r) {
    num += xs[r - 1] / static_cast<double>(r);
    den += 1.0 / static_cast<double>(r);
  }
  return num / den;
}

inline double target(const Vec& seg, const std::vector<Vec>& keywords) {
  Vec sims;
  for (const auto& k : keywords) sims.push_back(std::clamp(cosine(seg, k), 0.0, 1.0));
  return harmonic_mean_by_rank(sims);
}

struct RankInstance {
  std::vector<std::string> ids;
  std::vector<Vec> segments;
  Vec node_query;
  std::vector<Vec> keywords;
  std::vector<std::vector<Vec>> siblings;
  claimtree::RankingParams params;
};

struct Scored {
  std::string id;
  double target;
  double distractor;
  double score;
};

// Retrieval by cosine to the node query (positive only, top pool_size, ties by
// id), then every pooled segment is scored and the pool fully sorted.
inline std::vector<Scored> rank(const RankInstance& in) {
  std::vector<std::pair<double, std::size_t>> sims;
  for (std::size_t i = 0; i < in.segments.size(); ++i) {
    double s = cosine(in.segments[i], in.node_query);
    if (s > 0.0) sims.emplace_back(s, i);
  }
  std::sort(sims.begin(), sims.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return in.ids[a.second] < in.ids[b.second];
  });
  if (sims.size() > in.params.pool_size) sims.resize(in.params.pool_size);

  std::vector<Scored> out;
  for (const auto& [sim, i] : sims) {
    Scored s{in.ids[i], target(in.segments[i], in.keywords), 0.0, 0.0};
    if (in.siblings.empty()) {
      s.score = s.target;
    } else {
      double sum = 0.0;
      double mx = 0.0;
      for (const auto& sib : in.siblings) {
        double t = target(in.segments[i], sib);
        sum += t;
        mx = std::max(mx, t);
      }
      s.distractor = 0.5 * (sum / static_cast<double>(in.siblings.size())) + 0.5 * mx;
      s.score = (in.params.beta * s.target) /
                (in.params.gamma * std::max(s.distractor, in.params.epsilon));
    }
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (out.size() > in.params.k_segments) out.resize(in.params.k_segments);
  return out;
}

inline Vec random_unit(std::mt19937_64& rng, std::size_t dim, double bias) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (auto& x : v) x = g(rng) + bias;
  double n = std::sqrt(dot(v, v));
  for (auto& x : v) x /= n;
  return v;
}

inline RankInstance random_instance(std::mt19937_64& rng, std::size_t max_segments = 500,
                                    std::size_t max_siblings = 4, std::size_t max_keywords = 10,
                                    std::size_t dim = 24) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  RankInstance in;
  const double bias = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
  const std::size_t n = pick(1, max_segments);
  for (std::size_t i = 0; i < n; ++i) {
    in.ids.push_back("d" + std::to_string(pick(0, 99)) + "#" + std::to_string(i));
    in.segments.push_back(random_unit(rng, dim, bias));
  }
  in.node_query = random_unit(rng, dim, bias);
  for (std::size_t k = pick(1, max_keywords); k > 0; --k) in.keywords.push_back(random_unit(rng, dim, bias));
  for (std::size_t s = pick(0, max_siblings); s > 0; --s) {
    std::vector<Vec> set;
    for (std::size_t k = pick(1, max_keywords); k > 0; --k) set.push_back(random_unit(rng, dim, bias));
    in.siblings.push_back(std::move(set));
  }
  std::uniform_real_distribution<double> scale(0.25, 4.0);
  in.params.beta = scale(rng);
  in.params.gamma = scale(rng);
  in.params.pool_size = pick(1, max_segments + 50);
  in.params.k_segments = pick(1, 60);
  return in;
}

inline std::vector<claimtree::KeywordQuery> to_queries(const std::vector<Vec>& vs, const std::string& node) {
  std::vector<claimtree::KeywordQuery> out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    claimtree::KeywordQuery q;
    q.keyword = "k" + std::to_string(i);
    q.node_id = node;
    q.query_text = q.keyword;
    q.embedding = claimtree::EmbeddingVector(vs[i]);
    q.rank = i + 1;
    out.push_back(std::move(q));
  }
  return out;
}

// Same instance through the library: index, pool retrieval, rank_pool.
inline std::vector<claimtree::ScoredSegment> library_rank(const RankInstance& in) {
  claimtree::EmbeddingIndex index;
  for (std::size_t i = 0; i < in.ids.size(); ++i) {
    index.add(in.ids[i], claimtree::EmbeddingVector(in.segments[i]));
  }
  auto pool = claimtree::retrieve_pool(index, claimtree::EmbeddingVector(in.node_query), in.params.pool_size);
  if (pool.empty()) return {};
  std::vector<std::vector<claimtree::KeywordQuery>> sibs;
  for (std::size_t s = 0; s < in.siblings.size(); ++s) sibs.push_back(to_queries(in.siblings[s], "s" + std::to_string(s)));
  return claimtree::rank_pool(pool, to_queries(in.keywords, "t"), sibs, in.params);
}

inline bool close(double a, double b, double tol = 1e-12) {
  return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}

// Left-to-right scan: first rank whose clipped +-n window is under delta.
inline std::size_t window_scan(const std::vector<bool>& relevant, std::size_t n, double delta) {
  const std::size_t count = relevant.size();
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t lo = i >= n ? i - n : 0;
    std::size_t hi = std::min(count - 1, i + n);
    std::size_t yes = 0;
    for (std::size_t r = lo; r <= hi; ++r) yes += relevant[r] ? 1 : 0;
    if (static_cast<double>(yes) / static_cast<double>(hi - lo + 1) < delta) return i;
  }
  return count;
}

// Best single C99 boundary by exhaustive search: cosine of term counts, local
// rank with the given mask (self cells zeroed), inside density of the two
// blocks. Returns 0 when no boundary respects min_len.
inline std::size_t best_single_boundary(const std::vector<claimtree::Sentence>& sentences,
                                        std::size_t mask, std::size_t min_len) {
  const std::size_t n = sentences.size();
  std::vector<std::map<std::string, double>> counts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& t : sentences[i].terms) counts[i][t] += 1.0;
  }
  std::vector<Vec> sim(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0, a = 0.0, b = 0.0;
      for (const auto& [t, c] : counts[i]) {
        a += c * c;
        auto it = counts[j].find(t);
        if (it != counts[j].end()) d += c * it->second;
      }
      for (const auto& [t, c] : counts[j]) b += c * c;
      sim[i][j] = (a > 0 && b > 0) ? d / (std::sqrt(a) * std::sqrt(b)) : 0.0;
    }
  }
  const long r = static_cast<long>(mask / 2);
  std::vector<Vec> rank(n, Vec(n, 0.0));
  for (long i = 0; i < static_cast<long>(n); ++i) {
    for (long j = 0; j < static_cast<long>(n); ++j) {
      if (i == j) continue;
      double lower = 0, seen = 0;
      for (long a = i - r; a <= i + r; ++a) {
        for (long b = j - r; b <= j + r; ++b) {
          if (a < 0 || b < 0 || a >= static_cast<long>(n) || b >= static_cast<long>(n)) continue;
          if (a == i && b == j) continue;
          seen += 1;
          if (sim[a][b] < sim[i][j]) lower += 1;
        }
      }
      rank[i][j] = seen > 0 ? lower / seen : 0.0;
    }
  }
  auto block = [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = lo; j < hi; ++j) s += rank[i][j];
    }
    return s;
  };
  std::size_t best = 0;
  double best_density = -1.0;
  for (std::size_t p = min_len; p + min_len <= n; ++p) {
    double area = static_cast<double>(p * p + (n - p) * (n - p));
    double d = (block(0, p) + block(p, n)) / area;
    if (d > best_density) {
      best_density = d;
      best = p;
    }
  }
  return best;
}

// Two-topic document: sentences of `words` tokens drawn from disjoint
// vocabularies, the second topic starting at the returned sentence index.
struct TwoTopicDoc {
  claimtree::Document doc;
  std::size_t switch_at;
};

inline TwoTopicDoc two_topic_document(std::mt19937_64& rng, const std::string& id) {
  static const std::vector<std::string> kA = {"granite", "basalt", "quartz", "feldspar",
                                              "magma", "obsidian", "pumice", "gneiss"};
  static const std::vector<std::string> kB = {"violin", "cello", "sonata", "orchestra",
                                              "harmony", "melody", "trumpet", "concerto"};
  std::uniform_int_distribution<std::size_t> len(4, 8);
  std::uniform_int_distribution<std::size_t> word(0, 7);
  TwoTopicDoc out;
  out.switch_at = len(rng);
  const std::size_t total = out.switch_at + len(rng);
  out.doc.doc_id = id;
  out.doc.title = id;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& vocab = i < out.switch_at ? kA : kB;
    std::string s;
    for (std::size_t w = 0; w < 10; ++w) s += (w ? " " : "") + vocab[word(rng)];
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    out.doc.text += (i ? " " : "") + s + ".";
  }
  return out;
}

// Random prose over one shared vocabulary; used for tiling checks.
inline claimtree::Document random_document(std::mt19937_64& rng, const std::string& id) {
  static const std::vector<std::string> kWords = {
      "river", "stone", "garden", "engine", "letter", "market", "window", "forest", "signal",
      "ladder", "cotton", "harbor", "planet", "silver", "bridge", "winter", "pocket", "circle"};
  std::uniform_int_distribution<std::size_t> sentences(1, 40);
  std::uniform_int_distribution<std::size_t> words(1, 14);
  std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
  claimtree::Document d{id, id, ""};
  for (std::size_t i = sentences(rng); i > 0; --i) {
    std::string s;
    for (std::size_t w = words(rng); w > 0; --w) s += (s.empty() ? "" : " ") + kWords[pick(rng)];
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    d.text += (d.text.empty() ? "" : " ") + s + ".";
  }
  return d;
}

inline bool tiles(const std::vector<claimtree::Segment>& segs, std::size_t sentence_count) {
  std::size_t next = 0;
  for (const auto& s : segs) {
    if (s.start != next || s.end < s.start) return false;
    next = s.end + 1;
  }
  return next == sentence_count;
}

}  // namespace oracle
