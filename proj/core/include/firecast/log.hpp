#pragma once

#include <cstdio>
#include <string>

namespace firecast::log {

inline void warn(const std::string& msg) {
    std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}

inline void info(const std::string& msg) {
    std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

}  // namespace firecast::log
