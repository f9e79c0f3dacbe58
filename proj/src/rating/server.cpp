#include "lge/rating/server.hpp"

#include <httplib.h>

#include "lge/error.hpp"

namespace lge::rating {

namespace {

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

bool admin_ok(const httplib::Request& req, httplib::Response& res, const std::string& token) {
  if (!token.empty() && req.get_header_value(kAdminTokenHeader) == token) return true;
  reply(res, {401, {{"error", "admin token required"}}});
  return false;
}

}  // namespace

void install_routes(httplib::Server& server, RatingService& service,
                    const std::string& admin_token) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type, X-Admin-Token"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  server.Post("/sessions", [&service, admin_token](const httplib::Request& req,
                                                  httplib::Response& res) {
    if (!admin_ok(req, res, admin_token)) return;
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return reply(res, {400, {{"error", "malformed JSON body"}}});
    reply(res, service.create_session(body));
  });

  server.Get(R"(/sessions/([^/]+)/raters/([^/]+)/tasks/([^/]+))",
             [&service](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_task(req.matches[1], req.matches[2], req.matches[3]));
             });

  server.Post(R"(/sessions/([^/]+)/ratings)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.submit(req.matches[1], req.body, EventKind::rating));
              });

  server.Post(R"(/sessions/([^/]+)/comparisons)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.submit(req.matches[1], req.body, EventKind::comparison));
              });

  server.Get(R"(/sessions/([^/]+)/progress/([^/]+))",
             [&service](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.progress(req.matches[1], req.matches[2]));
             });

  server.Get(R"(/sessions/([^/]+)/summary)", [&service, admin_token](const httplib::Request& req,
                                                                    httplib::Response& res) {
    if (!admin_ok(req, res, admin_token)) return;
    reply(res, service.summary(req.matches[1], req.get_param_value("class")));
  });

  server.Get(R"(/sessions/([^/]+)/agreement)",
             [&service, admin_token](const httplib::Request& req, httplib::Response& res) {
               if (!admin_ok(req, res, admin_token)) return;
               reply(res, service.agreement(req.matches[1], req.get_param_value("class"),
                                            req.get_param_value("kind")));
             });

  server.Get(R"(/sessions/([^/]+)/export)", [&service, admin_token](const httplib::Request& req,
                                                                   httplib::Response& res) {
    if (!admin_ok(req, res, admin_token)) return;
    reply(res, service.export_bundle(req.matches[1]));
  });

  server.Get(R"(/sessions/([^/]+)/history)", [&service, admin_token](const httplib::Request& req,
                                                                    httplib::Response& res) {
    if (!admin_ok(req, res, admin_token)) return;
    reply(res, service.history(req.matches[1]));
  });

  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        reply(res, {500, {{"error", message}}});
      });
}

void serve(RatingService& service, const ServerOptions& options) {
  httplib::Server server;
  install_routes(server, service, options.admin_token);
  if (!server.bind_to_port(options.host, options.port)) {
    throw IoError("cannot bind " + options.host + ":" + std::to_string(options.port));
  }
  server.listen_after_bind();
}

}  // namespace lge::rating
