#pragma once

#include <stdexcept>
#include <string>

namespace mahadet {

// Base class for every error raised by this library. Callers that do not
// care about the precise condition can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MAHADET_DEFINE_ERROR(NAME)          \
  class NAME : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// linalg
MAHADET_DEFINE_ERROR(NonSymmetric);
MAHADET_DEFINE_ERROR(NotFactorizable);
MAHADET_DEFINE_ERROR(DimMismatch);

// gda
MAHADET_DEFINE_ERROR(MissingLabels);
MAHADET_DEFINE_ERROR(EmptyClass);
MAHADET_DEFINE_ERROR(DegenerateDim);
MAHADET_DEFINE_ERROR(InvalidLabel);
MAHADET_DEFINE_ERROR(BadLambda);

// refnet
MAHADET_DEFINE_ERROR(UnsupportedComposition);
MAHADET_DEFINE_ERROR(ShapeMismatch);
MAHADET_DEFINE_ERROR(BadConfig);

// ensemble / metrics
MAHADET_DEFINE_ERROR(EmptySet);
MAHADET_DEFINE_ERROR(SingleClass);

// baselines
MAHADET_DEFINE_ERROR(EmptyReference);
MAHADET_DEFINE_ERROR(TooFewNeighbors);
MAHADET_DEFINE_ERROR(DegenerateEstimate);

// attacks / incremental
MAHADET_DEFINE_ERROR(NonConvergence);
MAHADET_DEFINE_ERROR(TooFewSamples);

// io
MAHADET_DEFINE_ERROR(BadMagic);
MAHADET_DEFINE_ERROR(TruncatedFile);
MAHADET_DEFINE_ERROR(BadDtype);
MAHADET_DEFINE_ERROR(RaggedCsv);
MAHADET_DEFINE_ERROR(IoError);
MAHADET_DEFINE_ERROR(ConfigError);

#undef MAHADET_DEFINE_ERROR

}  // namespace mahadet
