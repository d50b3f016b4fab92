#include "fbsas/acsi/tcp_server.hpp"

#include <array>

#include <boost/asio.hpp>

namespace fbsas::acsi {

namespace asio = boost::asio;
using asio::ip::tcp;

std::string encode_frame(std::string_view body)
{
	auto n = static_cast<std::uint32_t>(body.size());
	std::string out;
	out.reserve(4 + body.size());
	out.push_back(static_cast<char>(n >> 24));
	out.push_back(static_cast<char>(n >> 16));
	out.push_back(static_cast<char>(n >> 8));
	out.push_back(static_cast<char>(n));
	out.append(body);
	return out;
}

namespace {

std::uint32_t frame_length(const std::array<std::uint8_t, 4> &h)
{
	return (std::uint32_t(h[0]) << 24) | (std::uint32_t(h[1]) << 16) | (std::uint32_t(h[2]) << 8) | h[3];
}

} // namespace

struct AcsiTcpServer::Impl {
	asio::io_context io;
	tcp::acceptor acceptor {io};
	std::uint64_t next_session = 1;
};

class AcsiTcpServer::Session : public std::enable_shared_from_this<Session> {
public:
	Session(tcp::socket socket, AcsiService &service, std::uint64_t id)
		: socket_(std::move(socket)), service_(service), id_(id)
	{
	}

	void read_header()
	{
		asio::async_read(socket_, asio::buffer(header_),
		                 [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
			                 if (ec)
				                 return;
			                 auto n = frame_length(self->header_);
			                 if (n > kMaxFrame)
				                 return;
			                 self->body_.resize(n);
			                 self->read_body();
		                 });
	}

private:
	void read_body()
	{
		asio::async_read(socket_, asio::buffer(body_), [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
			if (ec)
				return;
			auto reply = self->service_.handle_text(self->body_, self->id_);
			self->out_ = encode_frame(reply.dump());
			asio::async_write(self->socket_, asio::buffer(self->out_),
			                  [self](boost::system::error_code ec2, std::size_t) {
				                  if (!ec2)
					                  self->read_header();
			                  });
		});
	}

	tcp::socket socket_;
	AcsiService &service_;
	std::uint64_t id_;
	std::array<std::uint8_t, 4> header_ {};
	std::string body_;
	std::string out_;
};

AcsiTcpServer::AcsiTcpServer(AcsiService &service, std::string address, std::uint16_t port)
	: service_(service), address_(std::move(address)), port_(port)
{
}

AcsiTcpServer::~AcsiTcpServer()
{
	stop();
}

void AcsiTcpServer::start()
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
		throw Error("acsi server " + address_ + ":" + std::to_string(port_) + ": " + e.what());
	}
	impl_ = std::move(impl);
	accept();
	thread_ = std::thread([this] { impl_->io.run(); });
}

void AcsiTcpServer::stop()
{
	if (!impl_)
		return;
	impl_->io.stop();
	if (thread_.joinable())
		thread_.join();
	impl_.reset();
}

void AcsiTcpServer::accept()
{
	impl_->acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
		if (ec)
			return;
		++sessions_;
		std::make_shared<Session>(std::move(socket), service_, impl_->next_session++)->read_header();
		accept();
	});
}

struct AcsiClient::Impl {
	asio::io_context io;
	tcp::socket socket {io};
};

AcsiClient::AcsiClient(const std::string &host, std::uint16_t port) : impl_(std::make_unique<Impl>())
{
	try {
		tcp::resolver resolver(impl_->io);
		asio::connect(impl_->socket, resolver.resolve(host, std::to_string(port)));
	} catch (const boost::system::system_error &e) {
		throw Error("acsi client: " + std::string(e.what()));
	}
}

AcsiClient::~AcsiClient() = default;

nlohmann::json AcsiClient::request(const nlohmann::json &req)
{
	return request_raw(req.dump());
}

nlohmann::json AcsiClient::request_raw(std::string_view body)
{
	try {
		asio::write(impl_->socket, asio::buffer(encode_frame(body)));
		std::array<std::uint8_t, 4> header {};
		asio::read(impl_->socket, asio::buffer(header));
		std::string reply(frame_length(header), '\0');
		asio::read(impl_->socket, asio::buffer(reply));
		return nlohmann::json::parse(reply);
	} catch (const boost::system::system_error &e) {
		throw Error("acsi client: " + std::string(e.what()));
	}
}

} // namespace fbsas::acsi
