#ifndef CLDYN_VERSION_HPP
#define CLDYN_VERSION_HPP

namespace cldyn {

inline constexpr const char* version_string = "1.0.0";

} // namespace cldyn

#endif
