#pragma once

#include <filesystem>
#include <string>

#include "crosslink/managed/parser.hpp"
#include "crosslink/native/parser.hpp"
#include "crosslink/pipeline/pipeline.hpp"

namespace testing {

inline std::filesystem::path corpus() { return CROSSLINK_CORPUS_DIR; }

inline crosslink::managed::ManagedProgram mir(const std::string &text)
{
    return crosslink::managed::parse_managed(text, "test.mir");
}

inline crosslink::native::NativeModule nir(const std::string &text)
{
    return crosslink::native::parse_native(text, "test.nir");
}

/// Fresh scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch(const std::string &name)
{
    std::filesystem::path p = std::filesystem::path(CROSSLINK_SCRATCH_DIR) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace testing
