#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gputrace {

struct HostlistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expands a Slurm-style compressed hostlist such as "nid[001-003,005],gpu7"
// into a duplicate-free, order-preserving list of node names. Zero padding
// inside ranges is preserved. A segment may contain at most one bracket
// group; nested brackets, unbalanced brackets, and reversed ranges throw
// HostlistError.
std::vector<std::string> expand_hostlist(const std::string& expr);

// Compresses a node list back into hostlist notation. Inverse of
// expand_hostlist for lists produced by it; used by the generators and the
// round-trip property tests.
std::string compress_hostlist(const std::vector<std::string>& nodes);

}  // namespace gputrace
