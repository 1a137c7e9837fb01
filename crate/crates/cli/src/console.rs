//! Operator console server: static page at `/`, WebSocket at `/ws`.

use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use scc_sim::console::SetModeMessage;
use scc_sim::Mode;
use tungstenite::Message;

const INDEX: &str = include_str!("../assets/index.html");

#[derive(Default)]
struct Hub {
    clients: Mutex<Vec<Sender<String>>>,
}

pub struct Console {
    hub: Arc<Hub>,
    modes: Receiver<Mode>,
    addr: SocketAddr,
}

impl Console {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Queues a text frame for every connected client.
    pub fn broadcast(&self, text: &str) {
        let mut clients = self.hub.clients.lock().unwrap_or_else(|e| e.into_inner());
        clients.retain(|c| c.send(text.to_owned()).is_ok());
    }

    /// Mode changes received since the last call, oldest first.
    pub fn mode_requests(&self) -> Vec<Mode> {
        self.modes.try_iter().collect()
    }
}

/// Listens on localhost; port 0 picks a free one.
pub fn serve(port: u16) -> io::Result<Console> {
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    let addr = listener.local_addr()?;
    let hub = Arc::new(Hub::default());
    let (tx, modes) = mpsc::channel();
    let accept_hub = hub.clone();
    thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let (hub, tx) = (accept_hub.clone(), tx.clone());
            thread::spawn(move || {
                if let Err(e) = handle(stream, &hub, &tx) {
                    log::debug!("console connection ended: {e}");
                }
            });
        }
    });
    Ok(Console { hub, modes, addr })
}

fn request_path(stream: &TcpStream) -> io::Result<String> {
    let mut buf = [0u8; 2048];
    for _ in 0..100 {
        let n = stream.peek(&mut buf)?;
        if n == 0 {
            break;
        }
        let head = String::from_utf8_lossy(&buf[..n]);
        if let Some(line) = head.split("\r\n").next().filter(|_| head.contains("\r\n")) {
            return Ok(line.split_whitespace().nth(1).unwrap_or("/").to_owned());
        }
        thread::sleep(Duration::from_millis(5));
    }
    Err(io::Error::new(io::ErrorKind::InvalidData, "no request line"))
}

fn handle(mut stream: TcpStream, hub: &Hub, modes: &Sender<Mode>) -> io::Result<()> {
    let path = request_path(&stream)?;
    if path == "/ws" {
        return websocket(stream, hub, modes);
    }
    let mut head = Vec::new();
    let mut byte = [0u8; 1];
    while !head.ends_with(b"\r\n\r\n") && stream.read(&mut byte)? == 1 {
        head.push(byte[0]);
    }
    let (status, body) = match path.as_str() {
        "/" | "/index.html" => ("200 OK", INDEX),
        _ => ("404 Not Found", "not found\n"),
    };
    let kind = if status.starts_with("200") { "text/html; charset=utf-8" } else { "text/plain" };
    write!(
        stream,
        "HTTP/1.1 {status}\r\nContent-Type: {kind}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
}

fn websocket(stream: TcpStream, hub: &Hub, modes: &Sender<Mode>) -> io::Result<()> {
    let mut ws = tungstenite::accept(stream).map_err(|e| io::Error::other(e.to_string()))?;
    ws.get_mut().set_read_timeout(Some(Duration::from_millis(10)))?;
    let (tx, frames) = mpsc::channel();
    hub.clients.lock().unwrap_or_else(|e| e.into_inner()).push(tx);
    loop {
        match ws.read() {
            Ok(Message::Text(text)) => match SetModeMessage::parse(&text) {
                Ok(mode) => {
                    let _ = modes.send(mode);
                }
                Err(e) => log::warn!("console message ignored: {e}"),
            },
            Ok(Message::Close(_)) => return Ok(()),
            Ok(_) => {}
            Err(tungstenite::Error::Io(e))
                if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
            Err(e) => return Err(io::Error::other(e.to_string())),
        }
        while let Ok(frame) = frames.try_recv() {
            ws.send(Message::text(frame)).map_err(|e| io::Error::other(e.to_string()))?;
        }
    }
}
