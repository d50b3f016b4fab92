#include "fbsas/harness/gateway.hpp"

#include <deque>
#include <mutex>
#include <set>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "fbsas/core/error.hpp"

namespace fbsas::harness {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;

namespace {

constexpr std::size_t kMaxBacklog = 4096;

Gateway::Reply error_reply(int status, std::string code, std::string message)
{
	return {status, {{"error", std::move(code)}, {"message", std::move(message)}}};
}

std::optional<double> amps_of(const nlohmann::json &j)
{
	if (!j.is_object() || !j.contains("amps") || !j.at("amps").is_number())
		return std::nullopt;
	auto a = j.at("amps").get<double>();
	if (!(a >= 0.0) || a > 1e9)
		return std::nullopt;
	return a;
}

} // namespace

struct Gateway::Impl {
	asio::io_context io;
	tcp::acceptor acceptor {io};
	std::set<std::shared_ptr<EventSession>> events;
};

class Gateway::EventSession : public std::enable_shared_from_this<EventSession> {
public:
	EventSession(tcp::socket socket, Gateway &gw) : ws_(std::move(socket)), gw_(gw) {}

	void accept(http::request<http::string_body> req)
	{
		ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
			if (ec)
				return;
			self->gw_.impl_->events.insert(self);
			++self->gw_.clients_;
			self->read();
		});
	}

	void push(std::shared_ptr<const std::string> frame)
	{
		if (closed_)
			return;
		if (queue_.size() >= kMaxBacklog) {
			close();
			return;
		}
		queue_.push_back(std::move(frame));
		if (queue_.size() == 1)
			write();
	}

	void close()
	{
		if (closed_)
			return;
		closed_ = true;
		if (gw_.impl_->events.erase(shared_from_this()))
			--gw_.clients_;
		beast::error_code ec;
		ws_.next_layer().close(ec);
	}

private:
	void read()
	{
		ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
			if (ec) {
				self->close();
				return;
			}
			self->in_.consume(self->in_.size());
			self->read();
		});
	}

	void write()
	{
		ws_.text(true);
		ws_.async_write(asio::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
			if (ec) {
				self->close();
				return;
			}
			self->queue_.pop_front();
			if (!self->queue_.empty())
				self->write();
		});
	}

	websocket::stream<tcp::socket> ws_;
	Gateway &gw_;
	beast::flat_buffer in_;
	std::deque<std::shared_ptr<const std::string>> queue_;
	bool closed_ = false;
};

class Gateway::HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
	HttpSession(tcp::socket socket, Gateway &gw) : socket_(std::move(socket)), gw_(gw) {}

	void read()
	{
		req_ = {};
		parser_.emplace();
		parser_->body_limit(64 * 1024);
		http::async_read(socket_, buffer_, *parser_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
			if (ec)
				return;
			self->req_ = self->parser_->release();
			self->respond();
		});
	}

private:
	void respond()
	{
		if (websocket::is_upgrade(req_)) {
			if (req_.target() == "/events") {
				std::make_shared<EventSession>(std::move(socket_), gw_)->accept(std::move(req_));
				return;
			}
		}
		auto reply = gw_.handle(std::string_view(req_.method_string().data(), req_.method_string().size()),
		                        std::string_view(req_.target().data(), req_.target().size()), req_.body());
		res_ = {};
		res_.version(req_.version());
		res_.result(static_cast<http::status>(reply.status));
		res_.set(http::field::content_type, "application/json");
		res_.set(http::field::access_control_allow_origin, "*");
		res_.keep_alive(req_.keep_alive());
		res_.body() = reply.body.dump();
		res_.prepare_payload();
		http::async_write(socket_, res_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
			if (ec)
				return;
			if (self->res_.keep_alive())
				self->read();
			else {
				beast::error_code ignored;
				self->socket_.shutdown(tcp::socket::shutdown_send, ignored);
			}
		});
	}

	tcp::socket socket_;
	Gateway &gw_;
	beast::flat_buffer buffer_;
	std::optional<http::request_parser<http::string_body>> parser_;
	http::request<http::string_body> req_;
	http::response<http::string_body> res_;
};

Gateway::Gateway(GatewayHooks hooks, std::string address, std::uint16_t port)
	: hooks_(std::move(hooks)), address_(std::move(address)), port_(port)
{
}

Gateway::~Gateway()
{
	stop();
}

void Gateway::start()
{
	if (impl_)
		return;
	auto impl = std::make_unique<Impl>();
	try {
		tcp::endpoint ep(asio::ip::make_address(address_), port_);
		impl->acceptor.open(ep.protocol());
		impl->acceptor.set_option(tcp::acceptor::reuse_address(true));
		impl->acceptor.bind(ep);
		impl->acceptor.listen();
		bound_port_ = impl->acceptor.local_endpoint().port();
	} catch (const boost::system::system_error &e) {
		throw Error("gateway " + address_ + ":" + std::to_string(port_) + ": " + e.what());
	}
	impl_ = std::move(impl);
	accept();
	thread_ = std::thread([this] { impl_->io.run(); });
}

void Gateway::stop()
{
	if (!impl_)
		return;
	impl_->io.stop();
	if (thread_.joinable())
		thread_.join();
	impl_->events.clear();
	impl_.reset();
	clients_ = 0;
}

void Gateway::accept()
{
	impl_->acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
		if (ec)
			return;
		std::make_shared<HttpSession>(std::move(socket), *this)->read();
		accept();
	});
}

void Gateway::broadcast(const TraceRecord &r)
{
	if (!impl_ || clients_ == 0)
		return;
	auto frame = std::make_shared<const std::string>(to_json_line(r));
	asio::post(impl_->io, [this, frame] {
		auto sessions = impl_->events;
		for (const auto &s : sessions)
			s->push(frame);
	});
}

Gateway::Reply Gateway::handle(std::string_view method, std::string_view target, std::string_view body)
{
	auto path = target.substr(0, target.find('?'));
	const bool running = hooks_.running && hooks_.running();

	if (path == "/state") {
		if (method != "GET")
			return error_reply(405, "METHOD", "use GET");
		auto state = hooks_.state ? hooks_.state() : nullptr;
		if (!running || !state)
			return error_reply(503, "NOT_RUNNING", "simulation is not running");
		return {200, nlohmann::json::parse(state->dump())};
	}

	if (path != "/load" && path != "/disconnector" && path != "/fault")
		return error_reply(404, "NOT_FOUND", std::string(path));
	if (method != "POST")
		return error_reply(405, "METHOD", "use POST");

	auto j = nlohmann::json::parse(body, nullptr, false);
	if (j.is_discarded())
		return error_reply(400, "BAD_JSON", "body is not JSON");

	fb::InboundEvent ev;
	ev.origin = "gateway";
	if (path == "/load") {
		auto a = amps_of(j);
		if (!a)
			return error_reply(400, "BAD_REQUEST", "expected {\"amps\": non-negative number}");
		ev.target = hooks_.feeder + ".SET_LOAD";
		ev.data.emplace_back("AMPS", *a);
	} else if (path == "/disconnector") {
		auto state = j.is_object() && j.contains("state") && j.at("state").is_string() ? j.at("state").get<std::string>() : "";
		if (state != "open" && state != "closed")
			return error_reply(400, "BAD_REQUEST", "expected {\"state\": \"open\" | \"closed\"}");
		ev.target = hooks_.feeder + (state == "open" ? ".OPEN_DISC" : ".CLOSE_DISC");
	} else {
		if (j.is_object() && j.contains("clear") && j.at("clear") == true && !j.contains("amps")) {
			ev.target = hooks_.feeder + ".CLEAR_FAULT";
		} else if (auto a = amps_of(j)) {
			ev.target = hooks_.feeder + ".SET_FAULT";
			ev.data.emplace_back("AMPS", *a);
		} else {
			return error_reply(400, "BAD_REQUEST", "expected {\"amps\": n} or {\"clear\": true}");
		}
	}
	if (!running || !hooks_.inbound)
		return error_reply(503, "NOT_RUNNING", "simulation is not running");
	auto event = ev.target.substr(ev.target.rfind('.') + 1);
	hooks_.inbound->push(std::move(ev));
	return {202, {{"queued", event}}};
}

} // namespace fbsas::harness
