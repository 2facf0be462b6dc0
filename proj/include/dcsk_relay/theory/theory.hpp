#pragma once

#include "dcsk_relay/theory/ber.hpp"
#include "dcsk_relay/theory/buffer_chain.hpp"
#include "dcsk_relay/theory/delay.hpp"
#include "dcsk_relay/theory/gauss_hermite.hpp"
#include "dcsk_relay/theory/special_functions.hpp"
