#ifndef CLDYN_ERRORS_HPP
#define CLDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cldyn {

/** Invalid user input: malformed config, out-of-range parameter, unknown key.
 *  The command line tool maps this to exit code 1. */
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Numerical failure at run time: CFL violation, non-finite state, singular
 *  normalization, or an argument outside a routine's mathematical domain.
 *  The command line tool maps this to exit code 2. */
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cldyn

#endif
