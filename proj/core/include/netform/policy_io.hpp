#pragma once

#include <string>

#include "netform/mdp.hpp"

// Plain-text policy files so simulations can reuse solved policies:
// a small header followed by one "state action value" triple per line.

namespace netform::policy_io {

std::string export_policy(const mdp::Policy& policy);
mdp::Policy import_policy(const std::string& text);

void save_policy_file(const mdp::Policy& policy, const std::string& path);
mdp::Policy load_policy_file(const std::string& path);

}  // namespace netform::policy_io
