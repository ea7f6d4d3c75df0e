#pragma once

#include "qsg/report.hpp"
#include "qsg/suites.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qsgcli {

inline constexpr const char* kSchemaId = "qsg-report/1";

// One JSON object per line. Wall time is left out so identical configs give identical bytes.
std::string reportLine(const qsg::CheckReport& r);
void writeJsonl(std::ostream& os, const std::vector<qsg::CheckReport>& rs);

// Fixed-width summary with wall times and, where present, fitted convergence orders.
void writeTable(std::ostream& os, const std::vector<qsg::CheckReport>& rs, double totalSeconds);

void writeListJsonl(std::ostream& os);
void writeListTable(std::ostream& os);

}  // namespace qsgcli
