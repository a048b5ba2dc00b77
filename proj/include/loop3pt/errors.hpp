#pragma once

#include <stdexcept>
#include <string>

namespace loop3pt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LOOP3PT_ERROR(Name)            \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

LOOP3PT_ERROR(PoleError);
LOOP3PT_ERROR(NegativeSqrt);
LOOP3PT_ERROR(DomainError);
LOOP3PT_ERROR(ParityError);
LOOP3PT_ERROR(CapacityError);
LOOP3PT_ERROR(TriangleError);
LOOP3PT_ERROR(InvalidPattern);
LOOP3PT_ERROR(ModeMismatch);
LOOP3PT_ERROR(RangeError);
LOOP3PT_ERROR(UnsupportedMode);
LOOP3PT_ERROR(PlanMismatch);
LOOP3PT_ERROR(MissingSize);
LOOP3PT_ERROR(ConfigError);

#undef LOOP3PT_ERROR

}  // namespace loop3pt
