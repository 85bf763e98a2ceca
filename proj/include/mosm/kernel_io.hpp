#pragma once

#include <nlohmann/json.hpp>

#include "mosm/kernel.hpp"

namespace mosm {

// Document layout:
//   {channels, input_dim, mixture_size, constraint_mode,
//    components: [[{weight, mean[], scales[], delay[], phase}, ...per q], ...per channel],
//    noise_var: []}
nlohmann::json kernel_to_json(const MosmKernel& k);
MosmKernel kernel_from_json(const nlohmann::json& doc);

}  // namespace mosm
