#pragma once

#include <stdexcept>
#include <string>

namespace tsn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TSN_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

TSN_DEFINE_ERROR(InvalidArgument);
TSN_DEFINE_ERROR(ParseError);
TSN_DEFINE_ERROR(NoRoute);
TSN_DEFINE_ERROR(Overflow);
TSN_DEFINE_ERROR(TimeBeforeBase);
TSN_DEFINE_ERROR(QueueOverflow);
TSN_DEFINE_ERROR(ScheduleIncomplete);
TSN_DEFINE_ERROR(DurationTooShort);
TSN_DEFINE_ERROR(Infeasible);
TSN_DEFINE_ERROR(EmptySeries);
TSN_DEFINE_ERROR(NonMonotonic);
TSN_DEFINE_ERROR(InsufficientSamples);
TSN_DEFINE_ERROR(UnknownPort);
TSN_DEFINE_ERROR(TraceMismatch);

#undef TSN_DEFINE_ERROR

}  // namespace tsn
