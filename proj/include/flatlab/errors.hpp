#pragma once

#include <stdexcept>
#include <string>

namespace flatlab {

// Base for all library errors; carries a short machine-readable kind tag.
struct Error : std::runtime_error {
    std::string kind;
    Error(std::string k, const std::string& msg)
        : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& msg) : Error("InvalidParameter", msg) {}
};

struct InvalidPath : Error {
    explicit InvalidPath(const std::string& msg) : Error("InvalidPath", msg) {}
};

struct InvalidSurgery : Error {
    explicit InvalidSurgery(const std::string& msg) : Error("InvalidSurgery", msg) {}
};

struct RelDomainExceeded : Error {
    double max_admissible;  // sup of |dv| that would stay in-domain (open bound)
    RelDomainExceeded(const std::string& msg, double max_dv)
        : Error("RelDomainExceeded", msg), max_admissible(max_dv) {}
};

struct OutsideChart : Error {
    explicit OutsideChart(const std::string& msg) : Error("OutsideChart", msg) {}
};

struct DegenerateFrame : Error {
    explicit DegenerateFrame(const std::string& msg) : Error("DegenerateFrame", msg) {}
};

struct InvalidFrame : Error {
    explicit InvalidFrame(const std::string& msg) : Error("InvalidFrame", msg) {}
};

struct UnsupportedSurface : Error {
    explicit UnsupportedSurface(const std::string& msg) : Error("UnsupportedSurface", msg) {}
};

struct SamplerStarved : Error {
    explicit SamplerStarved(const std::string& msg) : Error("SamplerStarved", msg) {}
};

struct SearchExhausted : Error {
    explicit SearchExhausted(const std::string& msg) : Error("SearchExhausted", msg) {}
};

struct InvalidBasePoint : Error {
    explicit InvalidBasePoint(const std::string& msg) : Error("InvalidBasePoint", msg) {}
};

}  // namespace flatlab
