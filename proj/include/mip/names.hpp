#pragma once

#include <string>
#include <vector>

#include "mip/rng.hpp"

namespace mip {

const std::vector<std::string>& first_name_pool();
const std::vector<std::string>& last_name_pool();

std::string random_full_name(RngStream& rng);

// n distinct full names; throws if n exceeds the pool's pair count.
std::vector<std::string> unique_full_names(size_t n, RngStream& rng);

}  // namespace mip
