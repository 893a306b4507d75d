#pragma once

#include <stdexcept>
#include <string>

namespace wiretap {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define WIRETAP_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// matcore
WIRETAP_DEFINE_ERROR(InvalidMatrix);
WIRETAP_DEFINE_ERROR(DimensionMismatch);
WIRETAP_DEFINE_ERROR(NotPositiveDefinite);
WIRETAP_DEFINE_ERROR(SingularMatrix);
WIRETAP_DEFINE_ERROR(SingularBlock);
WIRETAP_DEFINE_ERROR(NumericalFailure);

// channel
WIRETAP_DEFINE_ERROR(RankDeficientChannel);
WIRETAP_DEFINE_ERROR(NonPositivePower);
WIRETAP_DEFINE_ERROR(UnsatisfiableClass);
WIRETAP_DEFINE_ERROR(SchemaError);

// objective / riccati / converse
WIRETAP_DEFINE_ERROR(CorrelationInfeasible);
WIRETAP_DEFINE_ERROR(WrongChannelClass);
WIRETAP_DEFINE_ERROR(SingularBasis);
WIRETAP_DEFINE_ERROR(FeasibleNotFound);
WIRETAP_DEFINE_ERROR(NoFeasibleCandidate);

#undef WIRETAP_DEFINE_ERROR

}  // namespace wiretap
