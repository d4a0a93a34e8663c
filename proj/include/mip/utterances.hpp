#pragma once

#include <string>
#include <vector>

#include "mip/rng.hpp"

namespace mip {

// Fixed utterance templates per activity label; every catalog label has at
// least five. Slot-filling activities yield candidate-name strings.
const std::vector<std::string>& utterance_templates(const std::string& activity);

// One template, uniformly. Throws on an unknown intent.
std::string compose_utterance(const std::string& activity, RngStream& rng);

// Brief canonical chatbot reply per activity ("Welcome Message" style stubs).
const std::string& chatbot_response_stub(const std::string& activity);

}  // namespace mip
