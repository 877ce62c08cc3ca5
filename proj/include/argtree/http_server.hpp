#ifndef ARGTREE_HTTP_SERVER_HPP
#define ARGTREE_HTTP_SERVER_HPP

#include <string>

#include "httplib.h"

#include "argtree/json_api.hpp"

namespace argtree {

// Serves JsonApi over HTTP on the loopback interface.
class HttpServer {
 public:
  explicit HttpServer(AnnotationService& service) : api_(service) {
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      const ApiResponse r = api_.handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    const char* any = R"(/api/.*)";
    server_.Get(any, dispatch);
    server_.Post(any, dispatch);
    server_.Put(any, dispatch);
  }

  // Port 0 picks a free port. Returns the bound port.
  int bind(int port, const std::string& host = "127.0.0.1") {
    const int p = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (p < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return p;
  }

  void listen() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  JsonApi api_;
  httplib::Server server_;
};

}  // namespace argtree

#endif  // ARGTREE_HTTP_SERVER_HPP
