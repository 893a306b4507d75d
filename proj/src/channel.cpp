#include "wiretap/channel.hpp"

#include <cmath>

#include <json.hpp>

#include "wiretap/rng.hpp"

namespace wiretap {

namespace {

using nlohmann::ordered_json;

Matrix random_gaussian(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

// Smallest s such that s^2 * G_a strictly dominates G_b, with margin.
double dominating_scale(const HermMatrix& g_a, const HermMatrix& g_b) {
  const auto eigs = spd_product_eigs(inv_pd(g_a), g_b);
  return std::sqrt(eigs.back()) * 1.2 + 0.05;
}

Matrix pad_rows(const Matrix& m, std::size_t rows) {
  if (m.rows() == rows) return m;
  Matrix out(rows, m.cols());
  out.set_block(0, 0, m);
  return out;
}

}  // namespace

const char* to_string(ChannelClass c) {
  switch (c) {
    case ChannelClass::DEGRADED_MAIN: return "DEGRADED_MAIN";
    case ChannelClass::DEGRADED_EVE: return "DEGRADED_EVE";
    case ChannelClass::INDEFINITE: return "INDEFINITE";
    case ChannelClass::BOUNDARY: return "BOUNDARY";
  }
  return "?";
}

void validate(const WiretapChannel& ch) {
  if (ch.H_M.cols() != ch.H_E.cols())
    throw DimensionMismatch("channel: H_M and H_E must share the transmit dimension");
  if (ch.H_M.cols() == 0) throw DimensionMismatch("channel: empty transmit dimension");
  if (!ch.H_M.all_finite() || !ch.H_E.all_finite())
    throw InvalidMatrix("channel: non-finite entries");
  if (!(ch.P > 0.0) || !std::isfinite(ch.P))
    throw NonPositivePower("channel: P = " + std::to_string(ch.P));
  const HermMatrix gm = ch.gram_main();
  if (min_eig_herm(gm) <= pd_threshold(gm))
    throw RankDeficientChannel("channel: H_M*H_M is not positive definite");
  const HermMatrix ge = ch.gram_eve();
  if (min_eig_herm(ge) <= pd_threshold(ge))
    throw RankDeficientChannel("channel: H_E*H_E is not positive definite");
}

ChannelClass classify(const WiretapChannel& ch) {
  validate(ch);
  switch (loewner_compare(ch.gram_main(), ch.gram_eve())) {
    case LoewnerClass::PD: return ChannelClass::DEGRADED_MAIN;
    case LoewnerClass::ND: return ChannelClass::DEGRADED_EVE;
    case LoewnerClass::INDEFINITE: return ChannelClass::INDEFINITE;
    case LoewnerClass::PSD:
    case LoewnerClass::NSD:
    case LoewnerClass::ZERO: return ChannelClass::BOUNDARY;
  }
  throw NumericalFailure("classify: unreachable");
}

WiretapChannel random_channel(std::uint64_t seed, std::size_t n, std::size_t n_M,
                              std::size_t n_E, double P,
                              std::optional<ChannelClass> want) {
  if (n < 1) throw DimensionMismatch("random_channel: n must be >= 1");
  if (n_M < n || n_E < n)
    throw RankDeficientChannel("random_channel: PD Gram matrices need n_M >= n and n_E >= n");
  if (!(P > 0.0)) throw NonPositivePower("random_channel: P must be positive");

  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    WiretapChannel ch;
    ch.P = P;
    ch.H_E = random_gaussian(rng, n_E, n);
    if (want == ChannelClass::BOUNDARY) {
      // Constructed rather than sampled: a PSD-with-kernel (or zero) Gram gap.
      HermMatrix ge = ch.gram_eve();
      Matrix gm_target = ge.matrix();
      if (n >= 2) {
        const Matrix v = random_gaussian(rng, n, 1);
        gm_target += v * v.adjoint();
      }
      ch.H_M = pad_rows(sqrt_psd(HermMatrix::symmetrized(gm_target)).matrix(), n_M);
    } else {
      ch.H_M = random_gaussian(rng, n_M, n);
      if (want == ChannelClass::DEGRADED_MAIN) {
        ch.H_M = ch.H_M * dominating_scale(ch.gram_main(), ch.gram_eve());
      } else if (want == ChannelClass::DEGRADED_EVE) {
        ch.H_E = ch.H_E * dominating_scale(ch.gram_eve(), ch.gram_main());
      }
    }
    try {
      validate(ch);
      if (!want || classify(ch) == *want) return ch;
    } catch (const Error&) {
      // degenerate draw; retry
    }
  }
  throw UnsatisfiableClass("random_channel: no instance of the requested class in 1000 tries");
}

// ---------------------------------------------------------------------------
// JSON schema:
// { "n":int, "n_M":int, "n_E":int, "P":number,
//   "H_M": [[[re,im],...],...], "H_E": [[[re,im],...],...] }
// ---------------------------------------------------------------------------

namespace {

long require_positive_int(const ordered_json& j, const char* field) {
  if (!j.contains(field)) throw SchemaError(std::string("missing field \"") + field + "\"");
  const auto& v = j.at(field);
  if (!v.is_number_integer() || v.get<long>() < 1)
    throw SchemaError(std::string("field \"") + field + "\" must be a positive integer");
  return v.get<long>();
}

Matrix require_matrix(const ordered_json& j, const char* field, std::size_t rows,
                      std::size_t cols) {
  if (!j.contains(field)) throw SchemaError(std::string("missing field \"") + field + "\"");
  const auto& rows_json = j.at(field);
  std::string where = field;
  if (!rows_json.is_array() || rows_json.size() != rows)
    throw SchemaError(where + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = rows_json.at(i);
    if (!row.is_array() || row.size() != cols)
      throw SchemaError(where + "[" + std::to_string(i) + "]: expected " +
                        std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) {
      const auto& entry = row.at(k);
      const std::string ctx =
          where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_number() ||
          !entry.at(1).is_number())
        throw SchemaError(ctx + ": expected [re, im]");
      const double re = entry.at(0).get<double>();
      const double im = entry.at(1).get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        throw SchemaError(ctx + ": entries must be finite");
      m(i, k) = Complex(re, im);
    }
  }
  return m;
}

}  // namespace

WiretapChannel parse_channel(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("top level must be an object");
  const long n = require_positive_int(j, "n");
  const long n_m = require_positive_int(j, "n_M");
  const long n_e = require_positive_int(j, "n_E");
  if (!j.contains("P")) throw SchemaError("missing field \"P\"");
  if (!j.at("P").is_number()) throw SchemaError("field \"P\" must be a number");
  WiretapChannel ch;
  ch.P = j.at("P").get<double>();
  ch.H_M = require_matrix(j, "H_M", static_cast<std::size_t>(n_m), static_cast<std::size_t>(n));
  ch.H_E = require_matrix(j, "H_E", static_cast<std::size_t>(n_e), static_cast<std::size_t>(n));
  return ch;
}

std::string serialize_channel(const WiretapChannel& ch) {
  ordered_json j;
  j["n"] = ch.n();
  j["n_M"] = ch.n_M();
  j["n_E"] = ch.n_E();
  j["P"] = ch.P;
  for (const char* field : {"H_M", "H_E"}) {
    const Matrix& m = field[2] == 'M' ? ch.H_M : ch.H_E;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (std::size_t k = 0; k < m.cols(); ++k)
        row.push_back({m(i, k).real(), m(i, k).imag()});
      rows.push_back(std::move(row));
    }
    j[field] = std::move(rows);
  }
  return j.dump(2) + "\n";
}

}  // namespace wiretap
