#include "fbsas/goose/udp_transport.hpp"

#include <array>

#include <boost/asio.hpp>

#include "fbsas/fb/system.hpp"

namespace fbsas::goose {

namespace asio = boost::asio;
using asio::ip::udp;

struct UdpTransport::Impl {
	asio::io_context io;
	udp::socket rx {io};
	udp::socket tx {io};
	udp::endpoint group;
	udp::endpoint from;
	std::array<std::uint8_t, 65536> buf {};
};

UdpTransport::UdpTransport(fb::SystemModel &system, GooseBus &bus, UdpOptions options)
	: system_(system), bus_(bus), options_(std::move(options))
{
}

UdpTransport::~UdpTransport()
{
	stop();
}

void UdpTransport::start()
{
	if (impl_)
		return;
	auto impl = std::make_unique<Impl>();
	try {
		auto group_addr = asio::ip::make_address(options_.group);
		impl->group = udp::endpoint(group_addr, options_.port);

		udp::endpoint listen(asio::ip::make_address(options_.listen_address), options_.port);
		impl->rx.open(listen.protocol());
		impl->rx.set_option(udp::socket::reuse_address(true));
		impl->rx.bind(listen);
		impl->rx.set_option(asio::ip::multicast::join_group(group_addr));

		impl->tx.open(impl->group.protocol());
		impl->tx.set_option(asio::ip::multicast::enable_loopback(options_.loopback));
		impl->tx.set_option(asio::ip::multicast::hops(1));
	} catch (const boost::system::system_error &e) {
		throw Error("goose udp transport: " + std::string(e.what()));
	}
	impl_ = std::move(impl);
	receive_loop();
	thread_ = std::thread([this] { impl_->io.run(); });
}

void UdpTransport::stop()
{
	if (!impl_)
		return;
	impl_->io.stop();
	if (thread_.joinable())
		thread_.join();
	impl_.reset();
}

void UdpTransport::send(const GooseMessage &m, VirtualTime)
{
	if (!impl_)
		throw Error("goose udp transport: not started");
	auto bytes = encode(m);
	boost::system::error_code ec;
	impl_->tx.send_to(asio::buffer(bytes), impl_->group, 0, ec);
	if (!ec)
		++sent_;
}

void UdpTransport::receive_loop()
{
	impl_->rx.async_receive_from(asio::buffer(impl_->buf), impl_->from, [this](boost::system::error_code ec, std::size_t n) {
		if (ec)
			return;
		try {
			auto m = decode(std::span<const std::uint8_t>(impl_->buf.data(), n));
			++received_;
			auto origin = "udp:" + impl_->from.address().to_string();
			system_.inbound().push(fb::InboundTask {std::move(origin), [this, m] { bus_.deliver(m); }});
		} catch (const CodecError &) {
			++decode_errors_;
		}
		receive_loop();
	});
}

} // namespace fbsas::goose
