#pragma once

#include <stdexcept>

namespace dcos {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StripViolation : public Error { using Error::Error; };
class InvalidParameters : public Error { using Error::Error; };
class MomentUnavailable : public Error { using Error::Error; };
class NotSquareIntegrable : public Error { using Error::Error; };
class DampingNotSupported : public Error { using Error::Error; };
class AllocationTooLarge : public Error { using Error::Error; };
class NotConverged : public Error { using Error::Error; };
class PlateauDetected : public Error { using Error::Error; };
class SmoothnessExceeded : public Error { using Error::Error; };
class DecayTooSlow : public Error { using Error::Error; };
class CorrelatedNotSupported : public Error { using Error::Error; };
class Overflow : public Error { using Error::Error; };

}  // namespace dcos
