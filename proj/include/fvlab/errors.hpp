#pragma once

#include <stdexcept>
#include <string>

namespace fvlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define FVLAB_DEFINE_ERROR(name)              \
  struct name : Error {                       \
    using Error::Error;                       \
  }

FVLAB_DEFINE_ERROR(NotStochastic);
FVLAB_DEFINE_ERROR(EmptyDomain);
FVLAB_DEFINE_ERROR(NotIrreducible);
FVLAB_DEFINE_ERROR(DimensionMismatch);
FVLAB_DEFINE_ERROR(StateNotInDomain);
FVLAB_DEFINE_ERROR(EigenFailure);
FVLAB_DEFINE_ERROR(NegativeTime);
FVLAB_DEFINE_ERROR(MassUnderflow);
FVLAB_DEFINE_ERROR(InconsistentSpectralData);
FVLAB_DEFINE_ERROR(NotCentered);
FVLAB_DEFINE_ERROR(NotSymmetric);
FVLAB_DEFINE_ERROR(UnstableDrift);
FVLAB_DEFINE_ERROR(SingularSystem);
FVLAB_DEFINE_ERROR(TailBoundFailure);
FVLAB_DEFINE_ERROR(InvalidParams);
FVLAB_DEFINE_ERROR(InvalidStepSize);
FVLAB_DEFINE_ERROR(TooLarge);
FVLAB_DEFINE_ERROR(SingularSolve);
FVLAB_DEFINE_ERROR(NonRepresentableXi);
FVLAB_DEFINE_ERROR(ParseError);
FVLAB_DEFINE_ERROR(ReportWriteFailure);

#undef FVLAB_DEFINE_ERROR

}  // namespace fvlab
