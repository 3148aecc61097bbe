#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pse/rankers.hpp"

namespace pse {

/// TREC run lines: `<user_id>:<query_id> Q0 <doc_id> <rank> <score> <tag>`,
/// score with 6 decimals. Throws if a user id contains ':'.
void write_run(std::ostream& out, const RunList& run, const std::string& tag);
void write_runs(std::ostream& out, const std::vector<RunList>& runs, const std::string& tag);

/// Groups lines by topic in first-appearance order. The topic is split at its
/// first ':' into user and query ids.
std::vector<RunList> read_runs(std::istream& in, const std::string& source = "<stream>");
std::vector<RunList> load_runs(const std::string& path);

}  // namespace pse
