#pragma once

#include <cstddef>

namespace greenmesh::scenario::detail {

struct BundledEntry {
    const char* name;
    const char* text;
};

extern const BundledEntry kBundled[];
extern const std::size_t kBundledCount;

}  // namespace greenmesh::scenario::detail
