#pragma once

#include <string>

#include "lge/rating/service.hpp"

namespace httplib {
class Server;
}

namespace lge::rating {

inline constexpr const char* kAdminTokenHeader = "X-Admin-Token";

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string admin_token;  // empty disables the admin endpoints
};

// Registers the HTTP routes on `server`. The service must outlive it.
void install_routes(httplib::Server& server, RatingService& service,
                    const std::string& admin_token);

// Blocks until the server stops. Throws IoError when the port cannot be bound.
void serve(RatingService& service, const ServerOptions& options);

}  // namespace lge::rating
