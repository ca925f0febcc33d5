#include "cdsflow/stream.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>
#include <vector>

#include "doctest.h"

using cdsflow::BoundedStream;
using cdsflow::StageStats;
using cdsflow::StreamPoisonedError;

TEST_CASE("stream rejects a zero capacity") {
    CHECK_THROWS_AS(BoundedStream<int>(0), std::invalid_argument);
}

TEST_CASE("messages come out in push order and drain after close") {
    BoundedStream<int> stream(4);
    for (int i = 0; i < 4; ++i) stream.push(i);
    stream.close();
    for (int i = 0; i < 4; ++i) {
        const auto item = stream.pop();
        REQUIRE(item.has_value());
        CHECK(*item == i);
    }
    CHECK_FALSE(stream.pop().has_value());
    CHECK_FALSE(stream.pop().has_value());  // end-of-batch is sticky
}

TEST_CASE("push blocks on a full stream until a consumer pops") {
    BoundedStream<int> stream(2);
    stream.push(0);
    stream.push(1);

    std::atomic<bool> pushed{false};
    std::thread producer([&] {
        stream.push(2);
        pushed.store(true);
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK_FALSE(pushed.load());
    CHECK(stream.pop().value() == 0);
    producer.join();
    CHECK(pushed.load());
    CHECK(stream.pop().value() == 1);
    CHECK(stream.pop().value() == 2);
}

TEST_CASE("pop blocks on an empty stream until a producer pushes") {
    BoundedStream<int> stream(2);
    std::thread producer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        stream.push(42);
    });
    CHECK(stream.pop().value() == 42);  // would deadlock if pop returned early
    producer.join();
}

TEST_CASE("close is one-shot and push after close is a protocol bug") {
    BoundedStream<int> stream(2);
    stream.push(1);
    stream.close();
    CHECK_THROWS_AS(stream.close(), std::logic_error);
    CHECK_THROWS_AS(stream.push(2), std::logic_error);
    CHECK(stream.pop().value() == 1);
    CHECK_FALSE(stream.pop().has_value());
}

TEST_CASE("poison wakes a blocked pop and names the origin stage") {
    BoundedStream<int> stream(2);
    std::thread killer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        stream.poison("timegrid");
    });
    try {
        stream.pop();
        FAIL("pop should have thrown");
    } catch (const StreamPoisonedError& e) {
        CHECK(e.origin_stage() == "timegrid");
    }
    killer.join();
    CHECK_THROWS_AS(stream.push(1), StreamPoisonedError);
    CHECK_THROWS_AS(stream.pop(), StreamPoisonedError);
    CHECK_NOTHROW(stream.close());  // close after poison is a no-op
}

TEST_CASE("poison wakes a blocked push") {
    BoundedStream<int> stream(1);
    stream.push(0);
    std::thread killer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        stream.poison("scatter");
    });
    CHECK_THROWS_AS(stream.push(1), StreamPoisonedError);
    killer.join();
}

TEST_CASE("the first poison origin wins") {
    BoundedStream<int> stream(2);
    stream.poison("first");
    stream.poison("second");
    try {
        stream.pop();
        FAIL("pop should have thrown");
    } catch (const StreamPoisonedError& e) {
        CHECK(e.origin_stage() == "first");
    }
}

TEST_CASE("stats count messages and time spent blocked") {
    BoundedStream<int> stream(1);
    StageStats producer_stats;
    StageStats consumer_stats;

    std::thread consumer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        while (stream.pop(&consumer_stats)) {
        }
    });
    stream.push(1, &producer_stats);
    stream.push(2, &producer_stats);  // blocks until the consumer wakes
    stream.close();
    consumer.join();

    CHECK(producer_stats.messages_out == 2);
    CHECK(consumer_stats.messages_in == 2);
    CHECK(producer_stats.blocked_ns > 0);
}

TEST_CASE("a stream of move-only messages works") {
    BoundedStream<std::unique_ptr<int>> stream(2);
    stream.push(std::make_unique<int>(5));
    stream.close();
    const auto item = stream.pop();
    REQUIRE(item.has_value());
    CHECK(**item == 5);
}
