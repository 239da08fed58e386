#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Two colliding bodies whose centers are closer than the contact floor;
// the collision normal is no longer well defined.
struct degenerate_contact_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-timestep integrator detected penetration deeper than a body radius
// (the step size is too large for the current velocities).
struct instability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training loss became non-finite.
struct training_diverged_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cascade
