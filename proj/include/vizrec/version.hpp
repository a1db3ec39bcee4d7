#pragma once

namespace vizrec {

inline constexpr const char* kToolName = "vizrec";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace vizrec
