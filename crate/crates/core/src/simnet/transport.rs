//! Duplex frame transports: in-process channels or TCP with a 4-byte length
//! prefix. Both expose the same split sink/source pair.

use std::collections::HashMap;
use std::io::{self, BufReader};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::{Arc, Mutex};

use crate::protocol::{read_frame, write_frame};

use super::SimError;

pub trait FrameSink: Send {
    fn send(&mut self, payload: &[u8]) -> io::Result<()>;
    /// Signals end of stream to the peer. Idempotent.
    fn close(&mut self);
}

pub trait FrameSource: Send {
    /// Next message, or `None` once the peer has closed.
    fn recv(&mut self) -> io::Result<Option<Vec<u8>>>;
}

pub struct Connection {
    pub sink: Box<dyn FrameSink>,
    pub source: Box<dyn FrameSource>,
}

struct ChanSink(Option<Sender<Vec<u8>>>);

impl FrameSink for ChanSink {
    fn send(&mut self, payload: &[u8]) -> io::Result<()> {
        match &self.0 {
            Some(tx) => tx
                .send(payload.to_vec())
                .map_err(|_| io::Error::from(io::ErrorKind::BrokenPipe)),
            None => Err(io::ErrorKind::BrokenPipe.into()),
        }
    }

    fn close(&mut self) {
        self.0 = None;
    }
}

struct ChanSource(Receiver<Vec<u8>>);

impl FrameSource for ChanSource {
    fn recv(&mut self) -> io::Result<Option<Vec<u8>>> {
        Ok(self.0.recv().ok())
    }
}

/// Two connected in-process endpoints.
pub fn pipe() -> (Connection, Connection) {
    let (a_tx, a_rx) = channel();
    let (b_tx, b_rx) = channel();
    (
        Connection {
            sink: Box::new(ChanSink(Some(a_tx))),
            source: Box::new(ChanSource(b_rx)),
        },
        Connection {
            sink: Box::new(ChanSink(Some(b_tx))),
            source: Box::new(ChanSource(a_rx)),
        },
    )
}

struct TcpSink(TcpStream);

impl FrameSink for TcpSink {
    fn send(&mut self, payload: &[u8]) -> io::Result<()> {
        write_frame(&mut self.0, payload)
    }

    fn close(&mut self) {
        let _ = self.0.shutdown(Shutdown::Write);
    }
}

struct TcpSource(BufReader<TcpStream>);

impl FrameSource for TcpSource {
    fn recv(&mut self) -> io::Result<Option<Vec<u8>>> {
        match read_frame(&mut self.0) {
            Err(e) if matches!(e.kind(), io::ErrorKind::ConnectionReset | io::ErrorKind::ConnectionAborted) => Ok(None),
            other => other,
        }
    }
}

fn tcp_connection(stream: TcpStream) -> io::Result<Connection> {
    stream.set_nodelay(true)?;
    let read = stream.try_clone()?;
    Ok(Connection {
        sink: Box::new(TcpSink(stream)),
        source: Box::new(TcpSource(BufReader::new(read))),
    })
}

type Registry = Arc<Mutex<HashMap<String, Sender<Connection>>>>;

/// Where endpoints live. In-process endpoints are arbitrary `host:port`
/// names; TCP endpoints are socket addresses.
#[derive(Clone)]
pub enum Network {
    InProcess(Registry),
    Tcp,
}

impl Network {
    pub fn in_process() -> Self {
        Network::InProcess(Arc::default())
    }

    pub fn tcp() -> Self {
        Network::Tcp
    }

    pub fn bind(&self, endpoint: &str) -> Result<Listener, SimError> {
        match self {
            Network::InProcess(reg) => {
                let mut reg = reg.lock().expect("registry lock");
                if reg.contains_key(endpoint) {
                    return Err(SimError::Bind {
                        endpoint: endpoint.to_string(),
                        source: io::ErrorKind::AddrInUse.into(),
                    });
                }
                let (tx, rx) = channel();
                reg.insert(endpoint.to_string(), tx);
                Ok(Listener {
                    endpoint: endpoint.to_string(),
                    inner: ListenerInner::InProcess(rx),
                    closer: ListenerCloser(CloserInner::InProcess(self.clone(), endpoint.to_string())),
                })
            }
            Network::Tcp => {
                let l = TcpListener::bind(endpoint).map_err(|source| SimError::Bind {
                    endpoint: endpoint.to_string(),
                    source,
                })?;
                let addr = l.local_addr()?.to_string();
                let stop = Arc::new(AtomicBool::new(false));
                Ok(Listener {
                    endpoint: addr.clone(),
                    inner: ListenerInner::Tcp(l, stop.clone()),
                    closer: ListenerCloser(CloserInner::Tcp(addr, stop)),
                })
            }
        }
    }

    pub fn connect(&self, endpoint: &str) -> Result<Connection, SimError> {
        let refused = |source| SimError::Connect {
            endpoint: endpoint.to_string(),
            source,
        };
        match self {
            Network::InProcess(reg) => {
                let reg = reg.lock().expect("registry lock");
                let tx = reg
                    .get(endpoint)
                    .ok_or_else(|| refused(io::ErrorKind::ConnectionRefused.into()))?;
                let (client, server) = pipe();
                tx.send(server)
                    .map_err(|_| refused(io::ErrorKind::ConnectionRefused.into()))?;
                Ok(client)
            }
            Network::Tcp => {
                let stream = TcpStream::connect(endpoint).map_err(refused)?;
                tcp_connection(stream).map_err(refused)
            }
        }
    }
}

enum ListenerInner {
    InProcess(Receiver<Connection>),
    Tcp(TcpListener, Arc<AtomicBool>),
}

pub struct Listener {
    endpoint: String,
    inner: ListenerInner,
    closer: ListenerCloser,
}

impl Listener {
    /// The bound endpoint (for TCP, the resolved socket address).
    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn closer(&self) -> ListenerCloser {
        self.closer.clone()
    }

    /// Blocks for the next connection; `None` once closed.
    pub fn accept(&self) -> Option<Connection> {
        match &self.inner {
            ListenerInner::InProcess(rx) => rx.recv().ok(),
            ListenerInner::Tcp(l, stop) => loop {
                let res = l.accept();
                if stop.load(Ordering::SeqCst) {
                    return None;
                }
                match res.and_then(|(s, _)| tcp_connection(s)) {
                    Ok(c) => return Some(c),
                    Err(e) => log::warn!("accept on {} failed: {e}", self.endpoint),
                }
            },
        }
    }
}

#[derive(Clone)]
enum CloserInner {
    InProcess(Network, String),
    Tcp(String, Arc<AtomicBool>),
}

/// Stops a listener's accept loop from another thread.
#[derive(Clone)]
pub struct ListenerCloser(CloserInner);

impl ListenerCloser {
    pub fn close(&self) {
        match &self.0 {
            CloserInner::InProcess(Network::InProcess(reg), endpoint) => {
                reg.lock().expect("registry lock").remove(endpoint);
            }
            CloserInner::InProcess(Network::Tcp, _) => {}
            CloserInner::Tcp(addr, stop) => {
                stop.store(true, Ordering::SeqCst);
                // Wake the blocking accept.
                let _ = TcpStream::connect(addr);
            }
        }
    }
}
