#pragma once

#include <stdexcept>
#include <string>

namespace tba {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Canonical serialization constraint violated (e.g. oversized payload).
struct FramingError : Error {
  using Error::Error;
};

/// Archive has an entry hole: a stalled beacon, not a forgery.
struct GapError : Error {
  using Error::Error;
};

/// Archive does not reach the requested time at all.
struct InsufficientArchiveError : Error {
  using Error::Error;
};

/// Every configured beacon was excluded; an empty XOR is fully predictable
/// and must never be used as a challenge.
struct NoTrustworthyChallengeError : Error {
  using Error::Error;
};

struct EntropyError : Error {
  using Error::Error;
};

/// Share-set reconstruction rejected. Deliberately does not distinguish a
/// missing share from a corrupted one.
struct ShareError : Error {
  using Error::Error;
};

}  // namespace tba
