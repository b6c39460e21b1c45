#pragma once

// Matching-vector locally decodable code over GF(2^t).
//
//   C(e_i)[z] = gamma^<u_i, z>   for z in Z_m^h,  C(x) = sum_i x_i C(e_i)
//
// The decoder for coordinate i picks v uniformly, reads y(v + b_j u_i) for
// each monomial a_j x^(b_j) of the decoding polynomial and returns
// gamma^(-<u_i, v>) * sum_j a_j y(v + b_j u_i).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mvldc/decpoly.hpp"
#include "mvldc/error.hpp"
#include "mvldc/gf2.hpp"
#include "mvldc/mvfam.hpp"
#include "mvldc/zmod.hpp"

namespace mvldc::ldc {

using gf2::Elem;
using zmod::Residue;
using zmod::ZVector;

/// Exact certificates enumerate every v; larger codes are refused.
inline constexpr std::uint64_t kMaxExactLength = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kMaxCodeLength = std::uint64_t{1} << 28;

struct Codeword {
  std::uint32_t m = 0;
  std::size_t h = 0;
  unsigned t = 0;
  gf2::Poly field_modulus = 0;
  std::vector<Elem> symbols;

  std::size_t size() const noexcept { return symbols.size(); }

  friend bool operator==(const Codeword&, const Codeword&) = default;
};

inline std::size_t hamming_distance(const Codeword& a, const Codeword& b) {
  require(a.size() == b.size(), "hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t p = 0; p < a.size(); ++p) d += a.symbols[p] != b.symbols[p] ? 1 : 0;
  return d;
}

struct DecoderQuery {
  std::size_t i = 0;
  ZVector v;
  std::vector<ZVector> positions;  // v + b_j u_i, j = 0..k-1
  std::vector<std::uint64_t> indices;
};

class Code {
 public:
  Code(gf2::Field field, gf2::OrderMElement gamma, mvfam::MatchingFamily family,
       decpoly::DecodingPolynomial poly)
      : field_(std::move(field)),
        gamma_(gamma),
        family_(std::move(family)),
        poly_(std::move(poly)),
        inst_(poly_, field_, gamma_) {
    m_ = family_.m;
    h_ = family_.h;
    require(m_ == poly_.m() && m_ == gamma_.m,
            "code: family, polynomial and gamma disagree on m");
    require(h_ >= 1, "code: dimension h must be >= 1");
    require(family_.size() >= 1, "code: empty family");
    if (auto rep = mvfam::verify_family(family_); !rep.valid) {
      fail(ErrorKind::kContractViolation, "code: family is not S-matching: " + rep.describe());
    }
    if (auto chk = decpoly::verify_decoding(poly_, family_.target, field_, gamma_); !chk.valid) {
      fail(ErrorKind::kContractViolation,
           "code: polynomial is not a decoding polynomial for the family's S: " + chk.describe());
    }
    length_ = 1;
    for (std::size_t j = 0; j < h_; ++j) {
      radix_.push_back(length_);
      length_ *= m_;
      if (length_ > kMaxCodeLength) {
        fail(ErrorKind::kLimitExceeded, "code length " + std::to_string(m_) + "^" +
                                            std::to_string(h_) + " exceeds 2^28");
      }
    }
    // shifts_[i * k + j] = b_j * u_i
    for (const ZVector& u : family_.vectors) {
      for (Residue e : inst_.exps()) {
        shifts_.push_back(ZVector::zero(m_, h_).axpy(e, u));
      }
    }
  }

  const gf2::Field& field() const noexcept { return field_; }
  const gf2::OrderMElement& gamma() const noexcept { return gamma_; }
  const mvfam::MatchingFamily& family() const noexcept { return family_; }
  const decpoly::DecodingPolynomial& polynomial() const noexcept { return poly_; }
  std::uint32_t m() const noexcept { return m_; }
  std::size_t h() const noexcept { return h_; }
  std::size_t n() const noexcept { return family_.size(); }
  /// Codeword length N = m^h.
  std::uint64_t length() const noexcept { return length_; }
  /// Query count = number of monomials.
  std::size_t k() const noexcept { return inst_.coefs().size(); }
  std::span<const Elem> coefficients() const noexcept { return inst_.coefs(); }
  std::span<const Residue> exponents() const noexcept { return inst_.exps(); }
  Elem gamma_power(std::uint64_t e) const { return inst_.gamma_powers()[e % m_]; }

  /// Little-endian mixed radix: sum_j z_j m^j.
  std::uint64_t index(const ZVector& z) const {
    require(z.dim() == h_ && z.modulus() == m_, "index: vector shape does not match the code");
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < h_; ++j) idx += z[j] * radix_[j];
    return idx;
  }

  ZVector deindex(std::uint64_t idx) const {
    require(idx < length_, "deindex: position out of range");
    std::vector<Residue> z(h_);
    for (std::size_t j = 0; j < h_; ++j) {
      z[j] = static_cast<Residue>(idx % m_);
      idx /= m_;
    }
    return ZVector(m_, std::move(z));
  }

  /// Index of deindex(v) + b_j u_i, without building vectors.
  std::uint64_t shifted_index(std::uint64_t v, std::size_t i, std::size_t j) const {
    const ZVector& w = shifts_[i * k() + j];
    std::uint64_t idx = 0;
    for (std::size_t c = 0; c < h_; ++c) {
      const std::uint64_t vc = v % m_;
      v /= m_;
      idx += ((vc + w[c]) % m_) * radix_[c];
    }
    return idx;
  }

  Codeword empty_word() const {
    return Codeword{m_, h_, field_.degree(), field_.modulus(),
                    std::vector<Elem>(length_, field_.zero())};
  }

  void check_word(const Codeword& w) const {
    if (w.m != m_ || w.h != h_ || w.size() != length_) {
      fail(ErrorKind::kInvalidArgument, "codeword shape does not match the code");
    }
    if (w.t != field_.degree() || w.field_modulus != field_.modulus()) {
      fail(ErrorKind::kInvalidArgument, "codeword belongs to a different field");
    }
  }

  /// check_word plus a range check of every symbol (one pass over the word).
  void check_symbols(const Codeword& w) const {
    check_word(w);
    for (std::size_t p = 0; p < w.size(); ++p) {
      if (!field_.contains(w.symbols[p])) {
        fail(ErrorKind::kInvalidArgument, "codeword symbol " + std::to_string(p) +
                                              " lies outside GF(2^" +
                                              std::to_string(field_.degree()) + ")");
      }
    }
  }

  /// C(x) = sum_i x_i gamma^<u_i, z>, one pass over z.
  Codeword encode(std::span<const Elem> x) const {
    require(x.size() == n(), "encode: message has " + std::to_string(x.size()) +
                                 " symbols, code has n = " + std::to_string(n()));
    for (Elem e : x) field_.check(e);
    Codeword out = empty_word();
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < n(); ++i) {
      if (x[i] != field_.zero()) live.push_back(i);
    }
    if (live.empty()) return out;
    const auto powers = inst_.gamma_powers();
    std::vector<Residue> z(h_, 0);
    std::vector<Residue> ip(n(), 0);  // <u_i, z>
    for (std::uint64_t idx = 0; idx < length_; ++idx) {
      Elem acc = field_.zero();
      for (std::size_t i : live) acc = field_.add(acc, field_.mul(x[i], powers[ip[i]]));
      out.symbols[idx] = acc;
      // Stepping z_j by one (including the wrap m-1 -> 0) adds u_ij mod m.
      for (std::size_t j = 0; j < h_; ++j) {
        for (std::size_t i : live) {
          ip[i] = static_cast<Residue>((ip[i] + family_.vectors[i][j]) % m_);
        }
        if (++z[j] < m_) break;
        z[j] = 0;
      }
    }
    return out;
  }

  Codeword basis_codeword(std::size_t i) const {
    require(i < n(), "basis_codeword: index out of range");
    std::vector<Elem> e(n(), field_.zero());
    e[i] = field_.one();
    return encode(e);
  }

  DecoderQuery decode_queries(std::size_t i, const ZVector& v) const {
    require(i < n(), "decode_queries: index out of range");
    DecoderQuery q{i, v, {}, {}};
    const std::uint64_t vi = index(v);
    for (std::size_t j = 0; j < k(); ++j) {
      q.indices.push_back(shifted_index(vi, i, j));
      q.positions.push_back(deindex(q.indices.back()));
    }
    return q;
  }

  Elem decode_combine(std::size_t i, const ZVector& v, std::span<const Elem> answers) const {
    require(i < n(), "decode_combine: index out of range");
    require(answers.size() == k(), "decode_combine: expected " + std::to_string(k()) +
                                       " answers, got " + std::to_string(answers.size()));
    return combine(zmod::inner_product(family_.vectors[i], v), answers);
  }

  /// gamma^(-ip) * sum_j a_j answers[j], with ip = <u_i, v>.
  Elem combine(Residue ip, std::span<const Elem> answers) const {
    const auto coefs = inst_.coefs();
    Elem acc = field_.zero();
    for (std::size_t j = 0; j < answers.size(); ++j) {
      acc = field_.add(acc, field_.mul(coefs[j], answers[j]));
    }
    return field_.mul(acc, inst_.gamma_powers()[(m_ - ip % m_) % m_]);
  }

  /// Runs the decoder with a fixed v.
  Elem decode_at(std::size_t i, const Codeword& word, const ZVector& v) const {
    check_word(word);
    const DecoderQuery q = decode_queries(i, v);
    std::vector<Elem> answers;
    for (std::uint64_t p : q.indices) answers.push_back(word.symbols[p]);
    return decode_combine(i, v, answers);
  }

  template <class Rng>
  ZVector random_point(Rng& rng) const {
    std::uniform_int_distribution<std::uint64_t> dist(0, length_ - 1);
    return deindex(dist(rng));
  }

  /// Randomized local decoder for coordinate i.
  template <class Rng>
  Elem decode(std::size_t i, const Codeword& word, Rng& rng) const {
    return decode_at(i, word, random_point(rng));
  }

 private:
  gf2::Field field_;
  gf2::OrderMElement gamma_;
  mvfam::MatchingFamily family_;
  decpoly::DecodingPolynomial poly_;
  decpoly::Instantiated inst_;
  std::uint32_t m_ = 0;
  std::size_t h_ = 0;
  std::uint64_t length_ = 0;
  std::vector<std::uint64_t> radix_;
  std::vector<ZVector> shifts_;
};

struct SmoothnessReport {
  std::size_t i = 0;
  std::uint64_t enumerated = 0;  // number of v checked
  bool uniform = true;           // every query slot is a bijection of Z_m^h
  bool correct = true;           // D_i(C(e_l)) = [l == i] for every v and l
  std::size_t bad_slot = 0;
  std::uint64_t bad_v = 0;
  std::size_t bad_l = 0;

  bool ok() const noexcept { return uniform && correct; }
};

inline void require_enumerable(const Code& code) {
  if (code.length() > kMaxExactLength) {
    fail(ErrorKind::kLimitExceeded, "code length " + std::to_string(code.length()) +
                                        " exceeds the exact-enumeration guard 2^24");
  }
}

/// All basis codewords C(e_1), ..., C(e_n).
inline std::vector<Codeword> basis_codewords(const Code& code) {
  std::vector<Codeword> out;
  for (std::size_t l = 0; l < code.n(); ++l) out.push_back(code.basis_codeword(l));
  return out;
}

/// Exact check over every v in Z_m^h: each query slot v -> v + b_j u_i hits
/// every position exactly once, and the decoder returns 1 on C(e_i) and 0 on
/// C(e_l), l != i.
inline SmoothnessReport verify_smoothness(const Code& code, std::size_t i,
                                          std::span<const Codeword> basis) {
  require_enumerable(code);
  require(i < code.n(), "verify_smoothness: index out of range");
  require(basis.size() == code.n(), "verify_smoothness: need all n basis codewords");
  const std::uint64_t n_len = code.length();
  const std::size_t k = code.k();
  SmoothnessReport rep;
  rep.i = i;
  rep.enumerated = n_len;

  std::vector<std::uint64_t> hits((n_len + 63) / 64);
  for (std::size_t j = 0; j < k && rep.uniform; ++j) {
    std::fill(hits.begin(), hits.end(), 0);
    for (std::uint64_t v = 0; v < n_len; ++v) {
      const std::uint64_t p = code.shifted_index(v, i, j);
      std::uint64_t& word = hits[p / 64];
      const std::uint64_t bit = std::uint64_t{1} << (p % 64);
      if (word & bit) {
        rep.uniform = false;
        rep.bad_slot = j;
        rep.bad_v = v;
        break;
      }
      word |= bit;
    }
  }

  const ZVector& u = code.family().vectors[i];
  std::vector<std::uint64_t> idx(k);
  std::vector<Elem> answers(k);
  std::vector<Residue> z(code.h(), 0);
  Residue ip = 0;  // <u_i, v>, stepped like the encoder
  for (std::uint64_t v = 0; v < n_len && rep.correct; ++v) {
    for (std::size_t j = 0; j < k; ++j) idx[j] = code.shifted_index(v, i, j);
    for (std::size_t l = 0; l < code.n(); ++l) {
      for (std::size_t j = 0; j < k; ++j) answers[j] = basis[l].symbols[idx[j]];
      const Elem got = code.combine(ip, answers);
      const Elem want = l == i ? code.field().one() : code.field().zero();
      if (got != want) {
        rep.correct = false;
        rep.bad_v = v;
        rep.bad_l = l;
        break;
      }
    }
    for (std::size_t c = 0; c < code.h(); ++c) {
      ip = static_cast<Residue>((ip + u[c]) % code.m());
      if (++z[c] < code.m()) break;
      z[c] = 0;
    }
  }
  return rep;
}

inline SmoothnessReport verify_smoothness(const Code& code, std::size_t i) {
  require_enumerable(code);
  const std::vector<Codeword> basis = basis_codewords(code);
  return verify_smoothness(code, i, basis);
}

enum class CorruptionMode { kUniform, kAdversarial };

struct TrialConfig {
  double delta = 0.0;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  CorruptionMode mode = CorruptionMode::kUniform;
  std::vector<std::uint64_t> positions;  // adversarial mode
};

/// floor(delta * N).
inline std::uint64_t corruption_budget(double delta, std::uint64_t length) {
  require(delta >= 0.0 && delta < 0.5, "corruption fraction must be in [0, 0.5)");
  return static_cast<std::uint64_t>(
      std::floor(static_cast<long double>(delta) * static_cast<long double>(length)));
}

/// Replaces floor(delta*N) random positions (uniform mode) or exactly the
/// listed positions (adversarial mode) with different random symbols.
template <class Rng>
Codeword corrupt(const Codeword& word, const TrialConfig& cfg, Rng& rng) {
  const std::uint64_t budget = corruption_budget(cfg.delta, word.size());
  std::vector<std::uint64_t> where;
  if (cfg.mode == CorruptionMode::kAdversarial) {
    if (cfg.positions.size() > budget) {
      fail(ErrorKind::kInvalidArgument, "adversarial list has " +
                                            std::to_string(cfg.positions.size()) +
                                            " positions, budget is " + std::to_string(budget));
    }
    where = cfg.positions;
    std::sort(where.begin(), where.end());
    require(std::adjacent_find(where.begin(), where.end()) == where.end(),
            "adversarial positions must be distinct");
    require(where.empty() || where.back() < word.size(), "adversarial position out of range");
  } else {
    // Floyd's sampling of `budget` distinct positions.
    std::unordered_set<std::uint64_t> picked;
    const std::uint64_t n_len = word.size();
    for (std::uint64_t j = n_len - budget; j < n_len; ++j) {
      std::uniform_int_distribution<std::uint64_t> dist(0, j);
      const std::uint64_t r = dist(rng);
      picked.insert(picked.count(r) ? j : r);
    }
    where.assign(picked.begin(), picked.end());
    std::sort(where.begin(), where.end());
  }
  Codeword out = word;
  const std::uint64_t top = (std::uint64_t{1} << word.t) - 1;
  if (top == 0) {
    require(where.empty(), "cannot corrupt symbols of an empty field");
    return out;
  }
  std::uniform_int_distribution<std::uint64_t> flip(1, top);
  for (std::uint64_t p : where) out.symbols[p].bits ^= flip(rng);
  return out;
}

/// The first floor(delta*N) positions. Every position is queried with the
/// same probability, so any fixed pattern of this size is worst-case for
/// the union bound.
inline std::vector<std::uint64_t> block_pattern(double delta, std::uint64_t length) {
  std::vector<std::uint64_t> out(corruption_budget(delta, length));
  for (std::uint64_t p = 0; p < out.size(); ++p) out[p] = p;
  return out;
}

struct TrialReport {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::uint64_t corrupted = 0;
  double rate = 0.0;
  double std_error = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  double bound = 0.0;  // k * delta
};

inline void wilson_interval(std::uint64_t failures, std::uint64_t trials, double& lo,
                            double& hi) {
  if (trials == 0) {
    lo = 0.0;
    hi = 1.0;
    return;
  }
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  lo = failures == 0 ? 0.0 : std::max(0.0, center - half);
  hi = failures == trials ? 1.0 : std::min(1.0, center + half);
}

/// Encodes x, corrupts once, then decodes coordinate i `trials` times.
inline TrialReport run_trials(const Code& code, std::span<const Elem> x, std::size_t i,
                              const TrialConfig& cfg) {
  require(i < code.n(), "run_trials: index out of range");
  std::mt19937_64 rng(cfg.seed);
  const Codeword clean = code.encode(x);
  const Codeword noisy = corrupt(clean, cfg, rng);
  TrialReport rep;
  rep.trials = cfg.trials;
  rep.corrupted = hamming_distance(clean, noisy);
  for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
    if (code.decode(i, noisy, rng) != x[i]) ++rep.failures;
  }
  if (rep.trials > 0) {
    rep.rate = static_cast<double>(rep.failures) / static_cast<double>(rep.trials);
    rep.std_error = std::sqrt(rep.rate * (1 - rep.rate) / static_cast<double>(rep.trials));
  }
  wilson_interval(rep.failures, rep.trials, rep.wilson_low, rep.wilson_high);
  rep.bound = static_cast<double>(code.k()) * cfg.delta;
  return rep;
}

}  // namespace mvldc::ldc
