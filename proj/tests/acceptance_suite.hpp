#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace acceptance {

struct Result {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// one line per criterion is written to out as each finishes
std::vector<Result> run_all(bool quick, std::ostream& out);

}  // namespace acceptance
