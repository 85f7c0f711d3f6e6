#pragma once

#include <stdexcept>

namespace ptforge {

// Base class for everything thrown by this library, so callers at the
// process boundary can map library failures to a single exit path.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target parameters lie in the broken phase (gamma >= lambda) where the
// two-level dynamics are no longer oscillatory.
class BrokenPhaseError : public Error {
 public:
  using Error::Error;
};

// A quantity has no finite definition for the given parameters
// (e.g. the sharp timescale at gamma == 0).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

// A two-level amplitude fell below the safe-division floor while
// evaluating the control coefficients.
class AmplitudeVanishesError : public Error {
 public:
  using Error::Error;
};

// A coupling exceeded the divergence cap; the control law is about to
// blow up and its value is no longer meaningful.
class DivergencePendingError : public Error {
 public:
  using Error::Error;
};

// The closed-form coupling was requested at or beyond its breakdown time.
class PastBreakdownError : public Error {
 public:
  using Error::Error;
};

// Interpolation was requested outside the sampled schedule span.
class OutOfSpanError : public Error {
 public:
  using Error::Error;
};

// The integrated state became non-finite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// A bisection could not establish endpoints with opposite classifications.
class NoBracketError : public Error {
 public:
  using Error::Error;
};

// Command line / configuration input was malformed (process exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Output could not be written (process exit code 2).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptforge
