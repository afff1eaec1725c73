#pragma once

#include <string>

namespace epiveri {

// Script text for a benchmark family: "dc" (ring of size cryptographers,
// at least 3), "otp" (pad length), "ot" (message length), "msg" (maximum
// delay), "twophase" (agents, with as many slots). Size 3 reproduces the
// reference instances token for token; bad family names or sizes throw
// BadParams.
std::string generate_family(const std::string& family, int size);

// Two-phase protocol with separate agent and slot counts.
std::string generate_twophase(int agents, int slots);

}  // namespace epiveri
