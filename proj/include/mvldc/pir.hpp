#pragma once

// k-server private information retrieval from the perfectly smooth decoder:
// each of the k decoder queries goes to a different replica, so every single
// server sees one uniformly distributed position regardless of i.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mvldc/error.hpp"
#include "mvldc/gf2.hpp"
#include "mvldc/ldc.hpp"

namespace mvldc::pir {

using gf2::Elem;

/// ceil(h * log2 m): bits of a position z in Z_m^h sent as a mixed-radix integer.
inline std::uint64_t position_bits(std::uint64_t m, std::size_t h) {
  require(m >= 2, "position_bits: m must be >= 2");
  require(h >= 1, "position_bits: h must be >= 1");
  unsigned __int128 n = 1;
  for (std::size_t j = 0; j < h; ++j) {
    n *= m;
    if (n > (static_cast<unsigned __int128>(1) << 64)) {
      return static_cast<std::uint64_t>(
          std::ceil(static_cast<long double>(h) * std::log2(static_cast<long double>(m))));
    }
  }
  // m is odd, so m^h is never a power of two and ceil(log2 N) = bit_width(N - 1).
  const unsigned __int128 top = n - 1;
  const std::uint64_t hi = static_cast<std::uint64_t>(top >> 64);
  return hi != 0 ? 64 + std::bit_width(hi) : std::bit_width(static_cast<std::uint64_t>(top));
}

struct CommunicationReport {
  std::size_t k = 0;
  std::uint64_t position_bits = 0;
  std::uint64_t bits_up = 0;    // k * position_bits
  std::uint64_t bits_down = 0;  // k * t
  std::uint64_t total = 0;
  std::uint64_t database_bits = 0;  // n * t
};

inline CommunicationReport communication_report(std::size_t k, std::uint64_t m, std::size_t h,
                                                 unsigned t, std::size_t n) {
  CommunicationReport r;
  r.k = k;
  r.position_bits = position_bits(m, h);
  r.bits_up = k * r.position_bits;
  r.bits_down = k * std::uint64_t{t};
  r.total = r.bits_up + r.bits_down;
  r.database_bits = n * std::uint64_t{t};
  return r;
}

/// A replica: request is one position, response one t-bit symbol.
class Server {
 public:
  explicit Server(std::shared_ptr<const ldc::Codeword> replica) : replica_(std::move(replica)) {}

  Elem answer(std::uint64_t position) const {
    require(position < replica_->size(), "server: position out of range");
    return replica_->symbols[position];
  }

 private:
  std::shared_ptr<const ldc::Codeword> replica_;
};

struct QueryRecord {
  std::size_t server = 0;
  std::uint64_t position = 0;
  Elem answer{};
};

struct Transcript {
  std::size_t i = 0;
  std::vector<QueryRecord> queries;
  std::uint64_t bits_up = 0;
  std::uint64_t bits_down = 0;
};

class PirInstance {
 public:
  PirInstance(ldc::Code code, std::vector<Elem> database)
      : code_(std::move(code)), database_(std::move(database)) {
    auto word = std::make_shared<const ldc::Codeword>(code_.encode(database_));
    for (std::size_t j = 0; j < code_.k(); ++j) servers_.emplace_back(word);
  }

  const ldc::Code& code() const noexcept { return code_; }
  std::span<const Elem> database() const noexcept { return database_; }
  std::size_t k() const noexcept { return servers_.size(); }
  const Server& server(std::size_t j) const { return servers_.at(j); }

  CommunicationReport communication() const {
    return communication_report(k(), code_.m(), code_.h(), code_.field().degree(), code_.n());
  }

 private:
  ldc::Code code_;
  std::vector<Elem> database_;
  std::vector<Server> servers_;
};

/// One honest retrieval of x_i with a fresh uniform v.
template <class Rng>
std::pair<Elem, Transcript> retrieve(const PirInstance& inst, std::size_t i, Rng& rng) {
  const ldc::Code& code = inst.code();
  require(i < code.n(), "retrieve: index out of range");
  const zmod::ZVector v = code.random_point(rng);
  const ldc::DecoderQuery q = code.decode_queries(i, v);
  Transcript tr;
  tr.i = i;
  std::vector<Elem> answers;
  for (std::size_t j = 0; j < inst.k(); ++j) {
    const Elem a = inst.server(j).answer(q.indices[j]);
    answers.push_back(a);
    tr.queries.push_back({j, q.indices[j], a});
  }
  const CommunicationReport comm = inst.communication();
  tr.bits_up = comm.bits_up;
  tr.bits_down = comm.bits_down;
  return {code.decode_combine(i, v, answers), tr};
}

/// Replays the protocol for every v; true iff all outcomes equal x_i.
inline bool verify_retrieval_exact(const PirInstance& inst, std::size_t i) {
  const ldc::Code& code = inst.code();
  ldc::require_enumerable(code);
  require(i < code.n(), "verify_retrieval_exact: index out of range");
  std::vector<Elem> answers(inst.k());
  const zmod::ZVector& u = code.family().vectors[i];
  std::vector<zmod::Residue> z(code.h(), 0);
  zmod::Residue ip = 0;
  for (std::uint64_t v = 0; v < code.length(); ++v) {
    for (std::size_t j = 0; j < inst.k(); ++j) {
      answers[j] = inst.server(j).answer(code.shifted_index(v, i, j));
    }
    if (code.combine(ip, answers) != inst.database()[i]) return false;
    for (std::size_t c = 0; c < code.h(); ++c) {
      ip = static_cast<zmod::Residue>((ip + u[c]) % code.m());
      if (++z[c] < code.m()) break;
      z[c] = 0;
    }
  }
  return true;
}

struct PrivacyCertificate {
  std::size_t i = 0;
  std::size_t server = 0;
  bool exact = true;  // false: sampled chi-square, not a proof
  bool uniform = true;
  std::uint64_t samples = 0;
  std::uint64_t min_count = 0;
  std::uint64_t max_count = 0;
  double chi_square = 0.0;
  std::uint64_t dof = 0;
};

/// Distribution of the position server j receives when x_i is retrieved.
/// Exact (every v enumerated, every position hit exactly once) up to 2^24
/// positions; beyond that a seeded chi-square test over 4096 buckets.
inline PrivacyCertificate verify_privacy(const PirInstance& inst, std::size_t i, std::size_t j,
                                         std::uint64_t seed = 0,
                                         std::uint64_t samples = std::uint64_t{1} << 22) {
  const ldc::Code& code = inst.code();
  require(i < code.n(), "verify_privacy: index out of range");
  require(j < inst.k(), "verify_privacy: server out of range");
  PrivacyCertificate cert;
  cert.i = i;
  cert.server = j;
  const std::uint64_t n_len = code.length();
  if (n_len <= ldc::kMaxExactLength) {
    std::vector<std::uint32_t> count(n_len, 0);
    for (std::uint64_t v = 0; v < n_len; ++v) ++count[code.shifted_index(v, i, j)];
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    cert.samples = n_len;
    cert.min_count = *lo;
    cert.max_count = *hi;
    cert.uniform = *lo == 1 && *hi == 1;
    return cert;
  }
  cert.exact = false;
  constexpr std::uint64_t kBuckets = 4096;
  std::vector<std::uint64_t> count(kBuckets, 0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, n_len - 1);
  for (std::uint64_t s = 0; s < samples; ++s) {
    ++count[code.shifted_index(dist(rng), i, j) % kBuckets];
  }
  double chi = 0.0;
  for (std::uint64_t b = 0; b < kBuckets; ++b) {
    const std::uint64_t size = n_len / kBuckets + (b < n_len % kBuckets ? 1 : 0);
    const double expected = static_cast<double>(samples) * static_cast<double>(size) /
                            static_cast<double>(n_len);
    const double d = static_cast<double>(count[b]) - expected;
    chi += d * d / expected;
  }
  const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
  cert.samples = samples;
  cert.min_count = *lo;
  cert.max_count = *hi;
  cert.chi_square = chi;
  cert.dof = kBuckets - 1;
  // Five standard deviations above the mean of a chi-square with dof degrees.
  cert.uniform = chi < static_cast<double>(cert.dof) + 5.0 * std::sqrt(2.0 * cert.dof);
  return cert;
}

}  // namespace mvldc::pir
