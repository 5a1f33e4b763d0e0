// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_ERRORS_HPP
#define QMIMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmimo {

// Malformed configuration input: unknown keys, unparsable values, bad paths.
class config_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// The requested factorization cannot exist for this geometry, e.g. no
// interference-free transmit subspace remains for a user, or an allocation
// ends with every sub-channel closed.
class infeasible_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Inputs left the validity region of a closed-form model: negative radicand
// in the water-level formula, nonpositive argument inside a rate logarithm,
// or a non-finite result. Reported, never silently clamped.
class model_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qmimo

#endif
