// SPDX-License-Identifier: MIT
#pragma once

#include "pencilbench/adversarial.hpp"
#include "pencilbench/best_rank1.hpp"
#include "pencilbench/conditioning.hpp"
#include "pencilbench/errors.hpp"
#include "pencilbench/io.hpp"
#include "pencilbench/linalg.hpp"
#include "pencilbench/mc.hpp"
#include "pencilbench/metrics.hpp"
#include "pencilbench/parallel.hpp"
#include "pencilbench/pba.hpp"
#include "pencilbench/properties.hpp"
#include "pencilbench/random.hpp"
#include "pencilbench/refine.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

#ifdef PENCILBENCH_VERSION
inline constexpr const char* kVersion = PENCILBENCH_VERSION;
#else
inline constexpr const char* kVersion = "unknown";
#endif

}  // namespace pencilbench
