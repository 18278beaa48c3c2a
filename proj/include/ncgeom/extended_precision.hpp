// SPDX-License-Identifier: Apache-2.0
//
// 128-bit binary floating point (IEEE quad) usable as an Eigen scalar.
#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

namespace ncg {

using Quad = boost::multiprecision::float128;

}  // namespace ncg
