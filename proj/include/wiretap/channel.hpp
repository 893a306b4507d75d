#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wiretap/matcore.hpp"

namespace wiretap {

/// Problem instance: the two channel matrices and the transmit power budget.
/// H_M is n_M x n (legitimate receiver), H_E is n_E x n (eavesdropper).
struct WiretapChannel {
  Matrix H_M;
  Matrix H_E;
  double P = 0.0;

  std::size_t n() const { return H_M.cols(); }
  std::size_t n_M() const { return H_M.rows(); }
  std::size_t n_E() const { return H_E.rows(); }

  HermMatrix gram_main() const { return HermMatrix::symmetrized(H_M.adjoint() * H_M); }
  HermMatrix gram_eve() const { return HermMatrix::symmetrized(H_E.adjoint() * H_E); }
};

/// Loewner class of H_M*H_M - H_E*H_E. BOUNDARY covers semidefinite-with-kernel
/// and zero differences, where neither degraded closed form strictly applies.
enum class ChannelClass { DEGRADED_MAIN, DEGRADED_EVE, INDEFINITE, BOUNDARY };

const char* to_string(ChannelClass c);

/// Confirms PD Gram matrices and positive finite power.
/// Throws RankDeficientChannel / NonPositivePower / DimensionMismatch.
void validate(const WiretapChannel& ch);

ChannelClass classify(const WiretapChannel& ch);

/// Seeded generator with i.i.d. standard complex normal entries, optionally
/// rescaled/retried until the class matches `want`. Requires n_M >= n and
/// n_E >= n so the PD-Gram assumption is satisfiable.
WiretapChannel random_channel(std::uint64_t seed, std::size_t n, std::size_t n_M,
                              std::size_t n_E, double P,
                              std::optional<ChannelClass> want = std::nullopt);

WiretapChannel parse_channel(const std::string& text);
std::string serialize_channel(const WiretapChannel& ch);

}  // namespace wiretap
