#pragma once

#include <map>
#include <string>

#include "handrec/ad/tensor.hpp"

namespace handrec::ad {

// Named-tensor container; std::map keeps serialization order deterministic.
using NamedTensors = std::map<std::string, Tensor>;

// Little-endian binary layout:
//   magic "HRCK" (4 bytes), version u32 = 1, count u64,
//   then per tensor: name_len u32, name bytes, rank u32, dims u64 each,
//   payload IEEE-754 f64 (row-major).
void save_tensors(const std::string& path, const NamedTensors& tensors);
NamedTensors load_tensors(const std::string& path);

}  // namespace handrec::ad
