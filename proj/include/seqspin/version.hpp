#pragma once

namespace seqspin {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace seqspin
