#pragma once

#include <istream>
#include <ostream>

#include "filexpert/history.hpp"

namespace filexpert::history {

// Newline-delimited JSON. The first line is a metadata record
// {"v":1,"kind":"meta",...}; every following line is one commit
// {"v":1,"kind":"commit","id":...,"author":{...},"timestamp":...,"changes":[...]}.
void write_ndjson(std::ostream& out, const CommitHistory& history);
CommitHistory read_ndjson(std::istream& in);

} // namespace filexpert::history
