#pragma once

#include <cstdint>
#include <string>

namespace oracle {

/// Native-IR text for a random loop-free module. Its exported `root` takes
/// (env:env, self:object, x:int, s:string) and mixes constant and unknown
/// branches, helper calls, table traffic and callback intrinsics. The same
/// seed always yields the same text.
std::string random_loop_free_module(std::uint32_t seed);

} // namespace oracle
