#pragma once

#include "deso/descriptor_system.hpp"

namespace deso {

/// Bundled benchmark plants behind the CLI repro command. The descriptor
/// plant has a singular E (rank 2), slow dimension 2 and a one-step
/// anticipation window; the UIO variant adds one unknown-input column and the
/// LTI plant drives the extended-state-observer path with a two-channel
/// disturbance.
DescriptorSystem demo_descriptor_plant();
DescriptorSystem demo_uio_plant();
LtiSystem demo_lti_plant();

}  // namespace deso
