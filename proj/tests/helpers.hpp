#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lnucb/core.hpp"

namespace testutil {

inline lnucb::Context vec(std::initializer_list<double> v)
{
    lnucb::Context x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double e : v) x[i++] = e;
    return x;
}

inline lnucb::Context random_unit(lnucb::Rng& rng, std::size_t d)
{
    lnucb::Context x(static_cast<Eigen::Index>(d));
    for (auto& v : x) v = rng.normal();
    return x / x.norm();
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("lnucb-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace testutil
