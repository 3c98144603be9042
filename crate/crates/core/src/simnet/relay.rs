//! A relay that forwards every message verbatim to an upstream server.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use super::{FrameSink, FrameSource, Listener, ListenerCloser, Network};

pub struct RelayHandle {
    endpoint: String,
    closer: ListenerCloser,
    acceptor: JoinHandle<Vec<JoinHandle<()>>>,
    forwarded: Arc<AtomicU64>,
}

impl RelayHandle {
    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Stops accepting and waits for relayed connections to drain. Returns
    /// the number of messages forwarded in either direction.
    pub fn shutdown(self) -> u64 {
        self.closer.close();
        for pump in self.acceptor.join().expect("relay acceptor") {
            pump.join().expect("relay pump");
        }
        self.forwarded.load(Ordering::SeqCst)
    }
}

fn pump(mut src: Box<dyn FrameSource>, mut dst: Box<dyn FrameSink>, counter: Arc<AtomicU64>) {
    while let Ok(Some(msg)) = src.recv() {
        if dst.send(&msg).is_err() {
            break;
        }
        counter.fetch_add(1, Ordering::SeqCst);
    }
    dst.close();
}

/// Accepts clients on `listener` and pairs each with a fresh upstream
/// connection. If upstream is unreachable the client is closed.
pub fn run_relay(listener: Listener, upstream: String, network: Network) -> RelayHandle {
    let endpoint = listener.endpoint().to_string();
    let closer = listener.closer();
    let forwarded = Arc::new(AtomicU64::new(0));
    let counter = Arc::clone(&forwarded);
    let acceptor = thread::spawn(move || {
        let mut pumps = Vec::new();
        while let Some(mut client) = listener.accept() {
            let up = match network.connect(&upstream) {
                Ok(c) => c,
                Err(e) => {
                    log::warn!("relay: {e}");
                    client.sink.close();
                    continue;
                }
            };
            let (c1, c2) = (Arc::clone(&counter), Arc::clone(&counter));
            pumps.push(thread::spawn(move || pump(client.source, up.sink, c1)));
            pumps.push(thread::spawn(move || pump(up.source, client.sink, c2)));
        }
        pumps
    });
    RelayHandle {
        endpoint,
        closer,
        acceptor,
        forwarded,
    }
}
